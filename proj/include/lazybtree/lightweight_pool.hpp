#pragma once

#include "lazybtree/block_store.hpp"
#include "lazybtree/element.hpp"
#include "lazybtree/packed_list.hpp"

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <list>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace lazybtree {

/**
 * One blocked list shared by all small gaps. Each gap occupies a
 * contiguous run of slots, possibly crossing into the next block; `runs`
 * of a block list the gaps of its slots in order.
 *
 * Any two adjacent blocks together hold more than B/2 elements, so the
 * pool uses at most 4n/B + 1 blocks for n elements.
 */
class LightPool {
public:
    using Blocks = std::list<ListBlock>;

    LightPool(BlockStore& store, HandleRegistry* registry) : store_(&store), registry_(registry) {}

    LightPool(const LightPool&) = delete;
    LightPool& operator=(const LightPool&) = delete;

    ~LightPool() {
        for (auto& b : blocks_) store_->free_block(b.id);
    }

    std::size_t size() const { return count_; }
    std::size_t block_count() const { return blocks_.size(); }
    bool holds(GapId g) const { return spans_.contains(g); }
    std::size_t gap_count() const { return spans_.size(); }

    /// Number of elements of gap g; resident metadata.
    std::size_t weight(GapId g) const { return span(g).count; }

    /// Appends a whole gap at the tail.
    void add_gap(GapId g, const std::vector<Element>& elems) {
        if (spans_.contains(g)) throw CorruptionError("gap already in the pool");
        if (elems.empty()) throw ContractError("empty gap added to the pool");
        const std::size_t cap = store_->block_size();
        std::size_t i = 0;
        if (!blocks_.empty() && blocks_.back().elems.size() < cap) {
            store_->access(blocks_.back().id, Access::read);
            store_->access(blocks_.back().id, Access::write);
        }
        while (i < elems.size()) {
            if (blocks_.empty() || blocks_.back().elems.size() >= cap) new_block(blocks_.end());
            ListBlock& t = blocks_.back();
            const std::size_t take = std::min(cap - t.elems.size(), elems.size() - i);
            for (std::size_t k = 0; k < take; ++k) {
                t.elems.push_back(elems[i + k]);
                place(elems[i + k].id, &t);
            }
            push_run(t, g, take);
            i += take;
        }
        count_ += elems.size();
        refresh_span(g, &blocks_.back());
        spans_[g].count = elems.size();
    }

    /// Adds one element to gap g (which must already be in the pool).
    ListBlock* insert(GapId g, const Element& e) {
        Span& sp = span(g);
        ListBlock* b = sp.last;
        store_->access(b->id, Access::read);
        std::size_t pos = run_end(*b, g);
        if (b->elems.size() >= store_->block_size()) {
            auto right = split_block(b->self);
            if (pos > b->elems.size()) {
                pos -= b->elems.size();
                b = &*right;
            }
        }
        b->elems.insert(b->elems.begin() + static_cast<std::ptrdiff_t>(pos), e);
        grow_run(*b, g, pos);
        place(e.id, b);
        store_->access(b->id, Access::write);
        ++count_;
        ++span(g).count;
        refresh_span(g, b);
        return b;
    }

    /// Removes element id from blk (already read by the caller). Returns
    /// the gap it belonged to.
    GapId erase(ListBlock* blk, ElemId id) {
        if (blk->owner != this) throw NotFoundError("element handle does not belong to the pool");
        auto pos = std::find_if(blk->elems.begin(), blk->elems.end(), [&](const Element& e) { return e.id == id; });
        if (pos == blk->elems.end()) throw NotFoundError("element not in its registered block");
        const std::size_t at = static_cast<std::size_t>(pos - blk->elems.begin());
        const GapId g = run_at(*blk, at);
        blk->elems.erase(pos);
        shrink_run(*blk, at);
        if (registry_) registry_->forget(id);
        --count_;
        Span& sp = span(g);
        --sp.count;
        if (sp.count == 0) {
            spans_.erase(g);
        } else if (!holds_in(*blk, g)) {
            if (sp.first == blk) sp.first = &*std::next(blk->self);
            if (sp.last == blk) sp.last = &*std::prev(blk->self);
        }
        store_->access(blk->id, Access::write);
        settle(blk->self);
        return g;
    }

    /// Changes the key of element id in place (block already read).
    void rekey(ListBlock* blk, ElemId id, Key key) {
        auto pos = std::find_if(blk->elems.begin(), blk->elems.end(), [&](const Element& e) { return e.id == id; });
        if (pos == blk->elems.end()) throw NotFoundError("element not in its registered block");
        pos->key = key;
        store_->access(blk->id, Access::write);
    }

    /// Reads the elements of gap g; one read per block of its run.
    std::vector<Element> gather(GapId g) const {
        const Span& sp = span(g);
        std::vector<Element> out;
        out.reserve(sp.count);
        for (auto it = sp.first->self;; ++it) {
            store_->access(it->id, Access::read);
            std::size_t pos = 0;
            for (const Run& r : it->runs) {
                if (r.gap == g)
                    out.insert(out.end(), it->elems.begin() + static_cast<std::ptrdiff_t>(pos),
                               it->elems.begin() + static_cast<std::ptrdiff_t>(pos + r.count));
                pos += r.count;
            }
            if (&*it == sp.last) break;
        }
        return out;
    }

    /// Replaces gap g's slots by `left` (kept as g) followed by `right`
    /// (as gap g2). Sizes must add up to the current weight.
    void split_gap(GapId g, const std::vector<Element>& left, GapId g2, const std::vector<Element>& right) {
        Span sp = span(g);
        if (left.size() + right.size() != sp.count || left.empty() || right.empty())
            throw ContractError("pool split sizes do not match the gap");
        std::size_t next = 0;
        auto source = [&]() -> std::pair<const Element&, GapId> {
            const std::size_t i = next++;
            if (i < left.size()) return {left[i], g};
            return {right[i - left.size()], g2};
        };
        for (auto it = sp.first->self;; ++it) {
            std::size_t pos = 0;
            std::vector<Run> runs;
            for (const Run& r : it->runs) {
                if (r.gap != g) {
                    runs.push_back(r);
                    pos += r.count;
                    continue;
                }
                for (std::size_t k = 0; k < r.count; ++k) {
                    auto [e, owner] = source();
                    it->elems[pos + k] = e;
                    place(e.id, &*it);
                    if (!runs.empty() && runs.back().gap == owner)
                        ++runs.back().count;
                    else
                        runs.push_back({owner, 1});
                }
                pos += r.count;
            }
            it->runs = std::move(runs);
            store_->access(it->id, Access::write);
            if (&*it == sp.last) break;
        }
        spans_[g2] = Span{};
        spans_[g].count = left.size();
        spans_[g2].count = right.size();
        refresh_span(g, sp.first);
        refresh_span(g2, sp.last);
    }

    /// Removes gap g entirely and returns its elements.
    std::vector<Element> remove_gap(GapId g) {
        std::vector<Element> out = gather(g);
        Span sp = span(g);
        std::vector<Blocks::iterator> touched;
        for (auto it = sp.first->self;; ++it) {
            touched.push_back(it);
            if (&*it == sp.last) break;
        }
        for (auto it : touched) {
            std::vector<Element> keep;
            std::vector<Run> runs;
            std::size_t pos = 0;
            for (const Run& r : it->runs) {
                if (r.gap != g) {
                    keep.insert(keep.end(), it->elems.begin() + static_cast<std::ptrdiff_t>(pos),
                                it->elems.begin() + static_cast<std::ptrdiff_t>(pos + r.count));
                    if (!runs.empty() && runs.back().gap == r.gap)
                        runs.back().count += r.count;
                    else
                        runs.push_back(r);
                }
                pos += r.count;
            }
            it->elems = std::move(keep);
            it->runs = std::move(runs);
            store_->access(it->id, Access::write);
        }
        for (const auto& e : out)
            if (registry_) registry_->forget(e.id);
        count_ -= out.size();
        spans_.erase(g);
        const bool has_prev = touched.front() != blocks_.begin();
        const auto before = has_prev ? std::prev(touched.front()) : blocks_.end();
        const auto after = std::next(touched.back());
        const std::uint64_t stop = after == blocks_.end() ? BlockId::kInvalid : after->id.value;
        for (auto it : touched) {
            if (it->elems.empty()) {
                store_->free_block(it->id);
                blocks_.erase(it);
            }
        }
        // fuse keeps the left block, so a forward sweep never holds a dead iterator
        const std::size_t half = store_->block_size() / 2;
        for (auto it = has_prev ? before : blocks_.begin(); it != blocks_.end();) {
            auto n = std::next(it);
            if (n == blocks_.end()) break;
            const bool last = n->id.value == stop;
            if (it->elems.size() + n->elems.size() <= half)
                fuse(it, n);
            else
                it = n;
            if (last) break;
        }
        return out;
    }

    /// Structural verification, not I/O-accounted.
    bool check(std::string* why = nullptr) const {
        auto bad = [&](std::string m) {
            if (why) *why = std::move(m);
            return false;
        };
        const std::size_t cap = store_->block_size();
        std::size_t total = 0;
        std::unordered_map<GapId, std::size_t> counts;
        std::unordered_set<GapId> closed;
        GapId open = 0;
        bool has_open = false;
        for (auto it = blocks_.begin(); it != blocks_.end(); ++it) {
            if (it->elems.empty() || it->elems.size() > cap) return bad("pool block size out of range");
            if (std::next(it) != blocks_.end() && it->elems.size() + std::next(it)->elems.size() <= cap / 2)
                return bad("adjacent pool blocks too empty");
            if (it->owner != this) return bad("pool block owner tag stale");
            std::size_t n = 0;
            for (std::size_t r = 0; r < it->runs.size(); ++r) {
                const Run& run = it->runs[r];
                if (run.count == 0) return bad("empty run");
                if (r > 0 && it->runs[r - 1].gap == run.gap) return bad("adjacent runs of one gap");
                const bool continues = r == 0 && has_open && open == run.gap;
                if (!continues && closed.contains(run.gap)) return bad("gap run not contiguous");
                if (has_open && open != run.gap) closed.insert(open);
                open = run.gap;
                has_open = true;
                counts[run.gap] += run.count;
                n += run.count;
            }
            if (n != it->elems.size()) return bad("runs do not cover the block");
            for (const auto& e : it->elems)
                if (registry_ && registry_->find(e.id) != &*it) return bad("registry entry stale");
            total += n;
        }
        if (total != count_) return bad("pool count mismatch");
        if (counts.size() != spans_.size()) return bad("pool span table size mismatch");
        for (const auto& [g, c] : counts) {
            auto sp = spans_.find(g);
            if (sp == spans_.end() || sp->second.count != c) return bad("pool span count mismatch");
            if (!holds_in(*sp->second.first, g) || !holds_in(*sp->second.last, g)) return bad("pool span ends stale");
        }
        return true;
    }

    /// Gap's elements without I/O accounting.
    std::vector<Element> peek(GapId g) const {
        const Span& sp = span(g);
        std::vector<Element> out;
        for (auto it = sp.first->self;; ++it) {
            std::size_t pos = 0;
            for (const Run& r : it->runs) {
                if (r.gap == g)
                    out.insert(out.end(), it->elems.begin() + static_cast<std::ptrdiff_t>(pos),
                               it->elems.begin() + static_cast<std::ptrdiff_t>(pos + r.count));
                pos += r.count;
            }
            if (&*it == sp.last) break;
        }
        return out;
    }

private:
    struct Span {
        ListBlock* first = nullptr;
        ListBlock* last = nullptr;
        std::size_t count = 0;
    };

    Span& span(GapId g) {
        auto it = spans_.find(g);
        if (it == spans_.end()) throw NotFoundError("gap " + std::to_string(g) + " not in the pool");
        return it->second;
    }
    const Span& span(GapId g) const {
        auto it = spans_.find(g);
        if (it == spans_.end()) throw NotFoundError("gap " + std::to_string(g) + " not in the pool");
        return it->second;
    }

    void place(ElemId id, ListBlock* b) {
        if (registry_) registry_->place(id, b);
    }

    static bool holds_in(const ListBlock& b, GapId g) {
        return std::any_of(b.runs.begin(), b.runs.end(), [&](const Run& r) { return r.gap == g; });
    }

    Blocks::iterator new_block(Blocks::iterator before) {
        auto it = blocks_.insert(before, ListBlock{store_->alloc_block(), {}, this, {}});
        it->self = it;
        it->elems.reserve(store_->block_size());
        return it;
    }

    static void push_run(ListBlock& b, GapId g, std::size_t n) {
        if (n == 0) return;
        if (!b.runs.empty() && b.runs.back().gap == g)
            b.runs.back().count += n;
        else
            b.runs.push_back({g, n});
    }

    // Slot just after g's run in b.
    static std::size_t run_end(const ListBlock& b, GapId g) {
        std::size_t pos = 0;
        for (const Run& r : b.runs) {
            pos += r.count;
            if (r.gap == g) return pos;
        }
        throw CorruptionError("gap run missing from its block");
    }

    static GapId run_at(const ListBlock& b, std::size_t at) {
        std::size_t pos = 0;
        for (const Run& r : b.runs) {
            if (at < pos + r.count) return r.gap;
            pos += r.count;
        }
        throw CorruptionError("slot beyond the runs of a block");
    }

    // The element at `pos` joined g's run (pos is at its end).
    static void grow_run(ListBlock& b, GapId g, std::size_t pos) {
        std::size_t p = 0;
        for (Run& r : b.runs) {
            p += r.count;
            if (r.gap == g && p == pos) {
                ++r.count;
                return;
            }
        }
        // g's run ended at the block start (moved by a split): start it here
        b.runs.insert(b.runs.begin(), Run{g, 1});
    }

    static void shrink_run(ListBlock& b, std::size_t at) {
        std::size_t pos = 0;
        for (std::size_t i = 0; i < b.runs.size(); ++i) {
            if (at < pos + b.runs[i].count) {
                if (--b.runs[i].count == 0) {
                    b.runs.erase(b.runs.begin() + static_cast<std::ptrdiff_t>(i));
                    if (i > 0 && i < b.runs.size() && b.runs[i - 1].gap == b.runs[i].gap) {
                        b.runs[i - 1].count += b.runs[i].count;
                        b.runs.erase(b.runs.begin() + static_cast<std::ptrdiff_t>(i));
                    }
                }
                return;
            }
            pos += b.runs[i].count;
        }
    }

    // Moves the upper half of a full block into a new block after it.
    Blocks::iterator split_block(Blocks::iterator it) {
        auto right = new_block(std::next(it));
        const std::size_t keep = it->elems.size() / 2;
        std::vector<Run> left_runs;
        std::size_t pos = 0;
        for (const Run& r : it->runs) {
            if (pos + r.count <= keep) {
                left_runs.push_back(r);
            } else if (pos >= keep) {
                push_run(*right, r.gap, r.count);
            } else {
                left_runs.push_back({r.gap, keep - pos});
                push_run(*right, r.gap, pos + r.count - keep);
            }
            pos += r.count;
        }
        right->elems.assign(it->elems.begin() + static_cast<std::ptrdiff_t>(keep), it->elems.end());
        it->elems.resize(keep);
        it->runs = std::move(left_runs);
        for (const auto& e : right->elems) place(e.id, &*right);
        store_->access(it->id, Access::write);
        refresh_all(*right);
        refresh_all(*it);
        return right;
    }

    // Appends b's contents to a (a directly precedes b) and frees b.
    void fuse(Blocks::iterator a, Blocks::iterator b) {
        store_->access(a->id, Access::read);
        store_->access(b->id, Access::read);
        for (const auto& e : b->elems) {
            a->elems.push_back(e);
            place(e.id, &*a);
        }
        for (const Run& r : b->runs) push_run(*a, r.gap, r.count);
        store_->access(a->id, Access::write);
        store_->free_block(b->id);
        std::vector<GapId> moved;
        for (const Run& r : b->runs) moved.push_back(r.gap);
        blocks_.erase(b);
        for (GapId g : moved) refresh_span(g, &*a);
    }

    // Restores the pair rule around a block that shrank.
    void settle(Blocks::iterator it) {
        if (it->elems.empty()) {
            auto nx = std::next(it);
            store_->free_block(it->id);
            auto prev = it == blocks_.begin() ? blocks_.end() : std::prev(it);
            blocks_.erase(it);
            if (prev != blocks_.end()) {
                settle_pair(prev);
            } else if (nx != blocks_.end()) {
                settle_pair(nx);
            }
            return;
        }
        settle_pair(it);
    }

    void settle_pair(Blocks::iterator it) {
        const std::size_t half = store_->block_size() / 2;
        bool changed = true;
        while (changed) {
            changed = false;
            if (it != blocks_.begin()) {
                auto p = std::prev(it);
                if (p->elems.size() + it->elems.size() <= half) {
                    fuse(p, it);
                    it = p;
                    changed = true;
                    continue;
                }
            }
            auto n = std::next(it);
            if (n != blocks_.end() && it->elems.size() + n->elems.size() <= half) {
                fuse(it, n);
                changed = true;
            }
        }
    }

    void refresh_all(ListBlock& b) {
        for (const Run& r : b.runs) refresh_span(r.gap, &b);
    }

    // Recomputes first/last block of g starting from a block holding it.
    void refresh_span(GapId g, ListBlock* some) {
        auto sp = spans_.find(g);
        if (sp == spans_.end()) sp = spans_.emplace(g, Span{}).first;
        auto first = some->self;
        while (first != blocks_.begin() && !first->runs.empty() && first->runs.front().gap == g) {
            auto p = std::prev(first);
            if (p->runs.empty() || p->runs.back().gap != g) break;
            first = p;
        }
        auto last = some->self;
        while (!last->runs.empty() && last->runs.back().gap == g) {
            auto n = std::next(last);
            if (n == blocks_.end() || n->runs.empty() || n->runs.front().gap != g) break;
            last = n;
        }
        sp->second.first = &*first;
        sp->second.last = &*last;
    }

    BlockStore* store_;
    HandleRegistry* registry_;
    Blocks blocks_;
    std::unordered_map<GapId, Span> spans_;
    std::size_t count_ = 0;
};

} // namespace lazybtree
