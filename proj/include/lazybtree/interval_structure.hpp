#pragma once

#include "lazybtree/aug_btree.hpp"
#include "lazybtree/block_store.hpp"
#include "lazybtree/element.hpp"
#include "lazybtree/packed_list.hpp"
#include "lazybtree/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace lazybtree {

/// An unsorted run of elements whose keys lie in [low, high).
struct Interval {
    Interval(BlockStore& s, HandleRegistry* reg, Element lo, Element hi)
        : low(lo), high(hi), list(s, reg, this) {}

    Interval(const Interval&) = delete;
    Interval& operator=(const Interval&) = delete;

    Element low;
    Element high;
    PackedList list;
};

struct IntervalItem {
    Element low;
    Element high;
    std::uint64_t size = 0;
    Interval* ptr = nullptr;
};

struct IntervalSummary {
    Element first_low;
    Element last_low;
    std::uint64_t intervals = 0;
    std::uint64_t elements = 0;

    friend bool operator==(const IntervalSummary&, const IntervalSummary&) = default;
};

struct IntervalTraits {
    using Item = IntervalItem;
    using Summary = IntervalSummary;

    static Summary of(const Item& it) { return {it.low, it.low, 1, it.size}; }
    static Summary identity() { return {}; }
    static Summary combine(const Summary& a, const Summary& b) {
        if (a.intervals == 0) return b;
        if (b.intervals == 0) return a;
        return {a.first_low, b.last_low, a.intervals + b.intervals, a.elements + b.elements};
    }
};

/// Elements between an interval and each end of its gap.
struct Outside {
    std::uint64_t left = 0;
    std::uint64_t right = 0;
};

/// Which side an interval is measured from, given the gap's sidedness.
/// Two-sided ties go to the left.
inline bool measured_from_left(Sidedness s, const Outside& o) {
    switch (s) {
    case Sidedness::one_left: return true;
    case Sidedness::one_right: return false;
    case Sidedness::two: return o.left <= o.right;
    case Sidedness::zero: break;
    }
    return true;
}

inline std::uint64_t outside_count(Sidedness s, const Outside& o) {
    switch (s) {
    case Sidedness::zero: return 0;
    case Sidedness::one_left: return o.left;
    case Sidedness::one_right: return o.right;
    case Sidedness::two: return std::min(o.left, o.right);
    }
    return 0;
}

class GapIntervals;

/// Receives every merge pass; used by verification code.
class MergeObserver {
public:
    virtual ~MergeObserver() = default;
    /// phi values are B times the sum of per-interval potentials.
    virtual void on_merge(const GapIntervals& g, std::uint64_t phi_before, std::uint64_t phi_after,
                          std::size_t merges) = 0;
};

struct IntervalSplit;

/**
 * The intervals of one gap: unsorted blocked lists, sorted relative to each
 * other, indexed by a B-tree with element counts.
 */
class GapIntervals {
public:
    using Tree = AugBTree<IntervalTraits>;
    using Path = Tree::Path;

    GapIntervals(BlockStore& store, HandleRegistry* registry, Sidedness side, Element low, Element high)
        : store_(&store), registry_(registry), side_(side), low_(low), high_(high),
          tree_(store, std::max<std::size_t>(4, store.block_size())) {}

    GapIntervals(const GapIntervals&) = delete;
    GapIntervals& operator=(const GapIntervals&) = delete;

    /// One interval holding `elems`; O(|elems|/B + 1) writes.
    static std::unique_ptr<GapIntervals> from_elements(BlockStore& store, HandleRegistry* registry, Sidedness side,
                                                       Element low, Element high, std::span<const Element> elems) {
        auto g = std::make_unique<GapIntervals>(store, registry, side, low, high);
        if (elems.empty()) return g;
        Interval* iv = g->adopt(std::make_unique<Interval>(store, registry, low, high));
        iv->list.append_bulk(elems);
        g->tree_.build({IntervalItem{low, high, elems.size(), iv}});
        g->size_ = elems.size();
        return g;
    }

    /// Consecutive intervals given as (low, elements); each span ends where
    /// the next begins, the last at `high`.
    static std::unique_ptr<GapIntervals> from_runs(BlockStore& store, HandleRegistry* registry, Sidedness side,
                                                   Element low, Element high,
                                                   const std::vector<std::pair<Element, std::vector<Element>>>& runs) {
        auto g = std::make_unique<GapIntervals>(store, registry, side, low, high);
        std::vector<IntervalItem> items;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const Element lo = i == 0 ? low : runs[i].first;
            const Element hi = i + 1 < runs.size() ? runs[i + 1].first : high;
            Interval* iv = g->adopt(std::make_unique<Interval>(store, registry, lo, hi));
            iv->list.append_bulk(runs[i].second);
            items.push_back({lo, hi, runs[i].second.size(), iv});
            g->size_ += runs[i].second.size();
        }
        g->tree_.build(items);
        return g;
    }

    std::uint64_t size() const { return size_; }
    std::size_t interval_count() const { return tree_.size(); }
    Sidedness sidedness() const { return side_; }
    void set_sidedness(Sidedness s) { side_ = s; }
    Element low() const { return low_; }
    Element high() const { return high_; }
    std::size_t node_count() const { return tree_.node_count(); }

    std::size_t block_count() const {
        std::size_t n = tree_.node_count();
        for (const auto& [p, iv] : owned_) n += iv->list.block_count();
        return n;
    }

    void set_observer(MergeObserver* obs) { observer_ = obs; }

    /// Widens the range after a neighboring gap was absorbed.
    void extend_low(const Element& lo) {
        low_ = lo;
        if (tree_.empty()) return;
        Path p = tree_.leftmost();
        tree_.update(p, [&](IntervalItem& it) { it.low = lo; });
        p.item().ptr->low = lo;
    }

    void extend_high(const Element& hi) {
        high_ = hi;
        if (tree_.empty()) return;
        Path p = tree_.rightmost();
        tree_.update(p, [&](IntervalItem& it) { it.high = hi; });
        p.item().ptr->high = hi;
    }

    /// Appends e to the interval containing it.
    ListBlock* insert(const Element& e) {
        if (e < low_ || !(e < high_)) throw ContractError("element outside the gap range");
        if (tree_.empty()) {
            Interval* iv = adopt(std::make_unique<Interval>(*store_, registry_, low_, high_));
            ListBlock* b = iv->list.append(e);
            tree_.insert(tree_.leftmost(), IntervalItem{low_, high_, 1, iv});
            ++size_;
            return b;
        }
        Path p = find_containing(e);
        ListBlock* b = p.item().ptr->list.append(e);
        tree_.update(p, [](IntervalItem& it) { ++it.size; });
        ++size_;
        return b;
    }

    /// Removes element id from blk (already read by the caller). Runs a
    /// merge pass afterwards unless told otherwise.
    void erase(ListBlock* blk, ElemId id, bool run_merge = true) {
        Interval* iv = owner_of(blk);
        iv->list.erase(blk, id);
        Path p = find_exact(iv->low);
        if (iv->list.empty())
            drop_interval(p);
        else
            tree_.update(p, [](IntervalItem& it) { --it.size; });
        --size_;
        if (run_merge && size_ > 0) merge();
    }

    /// Moves element id (in blk, already read) to new_key inside this gap.
    /// Returns whether it moved toward the nearest queried side.
    bool change(ListBlock* blk, ElemId id, Key new_key) {
        Interval* iv = owner_of(blk);
        auto pos = std::find_if(blk->elems.begin(), blk->elems.end(), [&](const Element& e) { return e.id == id; });
        if (pos == blk->elems.end()) throw NotFoundError("element not in the given block");
        const Element old = *pos;
        const Element moved{new_key, id};
        if (moved < low_ || !(moved < high_)) throw ContractError("changed key leaves the gap range");
        bool toward = false;
        if (side_ != Sidedness::zero && moved != old) {
            bool left = side_ == Sidedness::one_left;
            if (side_ == Sidedness::two) {
                std::uint64_t before = 0;
                find_exact(iv->low, &before);
                left = measured_from_left(side_, {before, size_ - before - iv->list.size()});
            }
            toward = left ? moved < old : old < moved;
        }
        if (iv->low <= moved && moved < iv->high) {
            iv->list.rekey(blk, id, new_key);
            return toward;
        }
        erase(blk, id, false);
        insert(moved);
        return toward;
    }

    /// Applies the merge rule to every adjacent same-side pair; returns the
    /// number of merges.
    std::size_t merge() {
        if (tree_.size() < 2 || side_ == Sidedness::zero) {
            if (observer_) observer_->on_merge(*this, 0, 0, 0);
            return 0;
        }
        std::vector<IntervalItem> items = scan_items();
        const std::size_t n = items.size();
        std::vector<Outside> outs = outsides(items);
        std::vector<char> left(n);
        for (std::size_t i = 0; i < n; ++i) left[i] = measured_from_left(side_, outs[i]) ? 1 : 0;

        // segments[i] = one past the last index merged into i
        std::vector<std::size_t> seg_end(n, 0);
        std::vector<char> starts(n, 0);
        std::size_t merges = 0;
        for (std::size_t i = 0; i < n && left[i];) {
            std::uint64_t cur = items[i].size;
            const std::uint64_t out = outs[i].left;
            std::size_t j = i + 1;
            while (j < n && left[j] && cur + items[j].size < out) cur += items[j++].size;
            starts[i] = 1;
            seg_end[i] = j;
            merges += j - i - 1;
            i = j;
        }
        for (std::size_t i = n; i-- > 0 && !left[i];) {
            std::uint64_t cur = items[i].size;
            const std::uint64_t out = outs[i].right;
            std::size_t j = i; // first index of the segment
            while (j > 0 && !left[j - 1] && cur + items[j - 1].size < out) cur += items[--j].size;
            starts[j] = 1;
            seg_end[j] = i + 1;
            merges += i - j;
            i = j;
        }
        if (merges == 0) {
            if (observer_) {
                const auto phi = phi_scaled(items);
                observer_->on_merge(*this, phi, phi, 0);
            }
            return 0;
        }
        const std::uint64_t phi_before = observer_ ? phi_scaled(items) : 0;
        std::vector<IntervalItem> merged;
        for (std::size_t i = 0; i < n; ++i) {
            if (!starts[i]) continue;
            IntervalItem head = items[i];
            for (std::size_t k = i + 1; k < seg_end[i]; ++k) {
                head.ptr->list.concat(std::move(items[k].ptr->list));
                head.size += items[k].size;
                head.high = items[k].high;
                owned_.erase(items[k].ptr);
            }
            head.ptr->high = head.high;
            merged.push_back(head);
        }
        tree_.build(merged);
        if (observer_) observer_->on_merge(*this, phi_before, phi_scaled(merged), merges);
        return merges;
    }

    /// Number of elements <= probe; one descent plus one interval scan.
    std::uint64_t count_le(const Element& probe) const {
        if (tree_.empty() || probe < low_) return 0;
        if (!(probe < high_)) return size_;
        std::uint64_t before = 0;
        Path p = find_containing(probe, &before);
        std::uint64_t in = 0;
        p.item().ptr->list.scan([&](const Element& e) { in += e <= probe ? 1 : 0; });
        return before + in;
    }

    /// Largest element; scans the last interval.
    Element max_element() const {
        if (tree_.empty()) throw EmptyError("max of an empty gap");
        Path p = tree_.rightmost();
        Element best = kBottom;
        p.item().ptr->list.scan([&](const Element& e) { best = std::max(best, e); });
        return best;
    }

    /// Frees every interval and returns the elements.
    std::vector<Element> take_all() {
        std::vector<Element> out;
        out.reserve(size_);
        for (const auto& it : scan_items()) {
            auto v = it.ptr->list.take_all();
            out.insert(out.end(), v.begin(), v.end());
        }
        owned_.clear();
        tree_.clear();
        size_ = 0;
        return out;
    }

    /// Splits at local rank k (1 <= k < size): the left gap gets the k
    /// smallest elements. Leaves *this empty.
    IntervalSplit split_rank(std::uint64_t k);

    /// Splits into elements <= probe and > probe. `local` may carry a
    /// count_le(probe) the caller already has. Both sides must be nonempty.
    /// Leaves *this empty.
    IntervalSplit split_key(const Element& probe, std::uint64_t local = 0);

    /// Intervals in order, without I/O accounting.
    std::vector<IntervalItem> peek() const { return tree_.peek_items(); }

    /// B times the sum of per-interval potentials (no N01 term).
    std::uint64_t phi_scaled() const { return phi_scaled(peek()); }

    std::uint64_t phi_scaled(const std::vector<IntervalItem>& items) const {
        const std::uint64_t B = store_->block_size();
        const auto outs = outsides(items);
        std::uint64_t phi = 0;
        for (std::size_t i = 0; i < items.size(); ++i) {
            const std::uint64_t out = outside_count(side_, outs[i]);
            phi += B + (items[i].size > out ? items[i].size - out : 0);
        }
        return phi;
    }

    std::vector<Outside> outsides(const std::vector<IntervalItem>& items) const {
        std::vector<Outside> outs(items.size());
        std::uint64_t before = 0;
        for (std::size_t i = 0; i < items.size(); ++i) {
            outs[i] = {before, size_ - before - items[i].size};
            before += items[i].size;
        }
        return outs;
    }

    static double interval_bound(std::uint64_t total) {
        return total == 0 ? 0.0 : 4.0 * std::log2(static_cast<double>(total)) + 2.0;
    }

    /// Per-side nesting bound that holds right after a merge pass: an
    /// interval with outside k >= 1 has at most max(1, 2 log2(T/k) + 2)
    /// same-side intervals further inside, T = elements on that side.
    bool nesting_ok(std::string* why = nullptr) const {
        if (side_ == Sidedness::zero) return true;
        const auto items = peek();
        const auto outs = outsides(items);
        const std::size_t n = items.size();
        std::vector<char> left(n);
        std::uint64_t t_left = 0, t_right = 0;
        std::size_t n_left = 0;
        for (std::size_t i = 0; i < n; ++i) {
            left[i] = measured_from_left(side_, outs[i]) ? 1 : 0;
            (left[i] ? t_left : t_right) += items[i].size;
            n_left += left[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t k = left[i] ? outs[i].left : outs[i].right;
            if (k == 0) continue;
            const std::size_t inside = left[i] ? n_left - i - 1 : i - n_left;
            const double T = static_cast<double>(left[i] ? t_left : t_right);
            const double bound = std::max(1.0, 2.0 * std::log2(T / static_cast<double>(k)) + 2.0);
            if (static_cast<double>(inside) > bound + 1e-9) {
                if (why) *why = "interval " + std::to_string(i) + " has " + std::to_string(inside) +
                                " intervals inside, bound " + std::to_string(bound);
                return false;
            }
        }
        return true;
    }

    /// Full structural check; not I/O-accounted.
    bool check(std::string* why = nullptr) const {
        auto bad = [&](std::string m) {
            if (why) *why = std::move(m);
            return false;
        };
        std::string tw;
        if (!tree_.check(&tw)) return bad("interval tree: " + tw);
        const auto items = peek();
        if (items.size() != owned_.size()) return bad("interval ownership count mismatch");
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < items.size(); ++i) {
            const IntervalItem& it = items[i];
            if (!owned_.contains(it.ptr)) return bad("tree references a foreign interval");
            if (it.low != it.ptr->low || it.high != it.ptr->high) return bad("interval span differs from tree");
            if (!(it.low < it.high)) return bad("empty interval span");
            if (i == 0 && it.low != low_) return bad("first interval does not start at the gap low");
            if (i + 1 == items.size() && it.high != high_) return bad("last interval does not end at the gap high");
            if (i + 1 < items.size() && it.high != items[i + 1].low) return bad("interval spans not contiguous");
            if (it.size == 0 || it.size != it.ptr->list.size()) return bad("interval size mismatch");
            std::string lw;
            if (!it.ptr->list.check(&lw)) return bad("interval list: " + lw);
            for (const auto& b : it.ptr->list.blocks())
                for (const auto& e : b.elems) {
                    if (e < it.low || !(e < it.high)) return bad("element outside its interval span");
                    if (registry_ && registry_->find(e.id) != &b) return bad("registry entry stale");
                }
            total += it.size;
        }
        if (total != size_) return bad("gap size differs from interval sizes");
        if (size_ > 0 && static_cast<double>(items.size()) > interval_bound(size_) + 1e-9)
            return bad("too many intervals: " + std::to_string(items.size()) + " for " + std::to_string(size_) +
                       " elements");
        return true;
    }

private:
    friend struct IntervalSplitter;

    Interval* adopt(std::unique_ptr<Interval> iv) {
        Interval* p = iv.get();
        owned_.emplace(p, std::move(iv));
        return p;
    }

    Interval* owner_of(ListBlock* blk) const {
        auto* iv = static_cast<Interval*>(blk->owner);
        if (!owned_.contains(iv)) throw NotFoundError("element handle does not belong to this gap");
        return iv;
    }

    std::vector<IntervalItem> scan_items() const {
        std::vector<IntervalItem> items;
        items.reserve(tree_.size());
        tree_.scan([&](const IntervalItem& it) { items.push_back(it); });
        return items;
    }

    // Interval whose span contains e; `before` receives elements to its left.
    Path find_containing(const Element& e, std::uint64_t* before = nullptr) const {
        std::uint64_t acc = 0;
        Path p = tree_.descend(
            [&](std::span<const IntervalSummary> sums) {
                std::size_t c = 0;
                while (c + 1 < sums.size() && sums[c + 1].first_low <= e) acc += sums[c++].elements;
                return c;
            },
            [&](std::span<const IntervalItem> items) {
                std::size_t i = 0;
                while (i + 1 < items.size() && items[i + 1].low <= e) acc += items[i++].size;
                return i;
            });
        if (!p.at_item()) throw CorruptionError("interval search fell off the tree");
        if (before) *before = acc;
        return p;
    }

    Path find_exact(const Element& low, std::uint64_t* before = nullptr) const {
        Path p = find_containing(low, before);
        if (p.item().low != low) throw CorruptionError("interval missing from its tree");
        return p;
    }

    // Removes an emptied interval and hands its span to a neighbor.
    void drop_interval(const Path& p) {
        IntervalItem gone = tree_.erase(p);
        owned_.erase(gone.ptr);
        if (tree_.empty()) return;
        if (gone.low == low_) {
            Path first = tree_.leftmost();
            tree_.update(first, [&](IntervalItem& it) { it.low = gone.low; });
            first.item().ptr->low = gone.low;
        } else {
            Path prev = find_containing(predecessor(gone.low));
            tree_.update(prev, [&](IntervalItem& it) { it.high = gone.high; });
            prev.item().ptr->high = gone.high;
        }
    }

    BlockStore* store_;
    HandleRegistry* registry_;
    Sidedness side_;
    Element low_;
    Element high_;
    Tree tree_;
    std::unordered_map<Interval*, std::unique_ptr<Interval>> owned_;
    std::uint64_t size_ = 0;
    MergeObserver* observer_ = nullptr;
};

struct IntervalSplit {
    std::unique_ptr<GapIntervals> left;
    std::unique_ptr<GapIntervals> right;
    std::uint64_t x_left = 0;
    std::uint64_t x_right = 0;
    Element boundary;  ///< largest element of the left side
    Element right_low; ///< first point of the right gap's range
};

/// Sizes of the pieces one side is cut into, outward from the query point.
inline std::vector<std::uint64_t> piece_sizes_outward(std::uint64_t s) {
    const std::uint64_t a = (s + 3) / 4;
    const std::uint64_t b = s / 4;
    std::vector<std::uint64_t> out;
    for (std::uint64_t v : {a, b, s - a - b})
        if (v > 0) out.push_back(v);
    return out;
}

struct IntervalSplitter {
    // Cuts v into consecutive rank groups of the given sizes (ascending).
    static std::vector<std::vector<Element>> cut(std::vector<Element> v, const std::vector<std::uint64_t>& sizes,
                                                 BlockStore* store) {
        std::vector<std::vector<Element>> out;
        for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
            const Element pivot = select_kth(v, sizes[i], store);
            auto [lo, hi] = partition_at(v, pivot, store);
            out.push_back(std::move(lo));
            v = std::move(hi);
        }
        out.push_back(std::move(v));
        return out;
    }

    static IntervalSplit run(GapIntervals& g, std::uint64_t k, const Element* probe) {
        BlockStore* store = g.store_;
        g.merge();
        std::vector<IntervalItem> items = g.scan_items();
        std::size_t idx = 0;
        std::uint64_t before = 0;
        if (probe) {
            while (idx + 1 < items.size() && items[idx + 1].low <= *probe) before += items[idx++].size;
        } else {
            while (before + items[idx].size < k) before += items[idx++].size;
        }
        Interval* iv = items[idx].ptr;
        std::vector<Element> elems = iv->list.take_all();
        std::vector<Element> L, R;
        Element boundary;
        if (probe) {
            std::tie(L, R) = partition_at(elems, *probe, store);
            if (before + L.size() != k) throw CorruptionError("key split count changed during the split");
        } else {
            boundary = select_kth(elems, k - before, store);
            std::tie(L, R) = partition_at(elems, boundary, store);
        }
        Element right_low;
        if (L.empty()) {
            right_low = iv->low;
            Element best = kBottom;
            items[idx - 1].ptr->list.scan([&](const Element& e) { best = std::max(best, e); });
            boundary = best;
        } else {
            boundary = *std::max_element(L.begin(), L.end());
            right_low = R.empty() ? iv->high : successor(boundary);
        }

        // pieces in ascending order with their spans
        auto left_sizes = piece_sizes_outward(L.size());
        std::reverse(left_sizes.begin(), left_sizes.end());
        auto right_sizes = piece_sizes_outward(R.size());
        auto make_pieces = [&](std::vector<Element> side, const std::vector<std::uint64_t>& sizes, Element lo,
                               Element hi) {
            std::vector<std::unique_ptr<Interval>> out;
            if (side.empty()) return out;
            auto groups = cut(std::move(side), sizes, store);
            for (std::size_t i = 0; i < groups.size(); ++i) {
                const Element top = *std::max_element(groups[i].begin(), groups[i].end());
                const Element piece_hi = i + 1 == groups.size() ? hi : successor(top);
                auto p = std::make_unique<Interval>(*store, g.registry_, lo, piece_hi);
                p->list.append_bulk(groups[i]);
                out.push_back(std::move(p));
                lo = piece_hi;
            }
            return out;
        };
        auto left_pieces = make_pieces(std::move(L), left_sizes, iv->low, right_low);
        auto right_pieces = make_pieces(std::move(R), right_sizes, right_low, iv->high);

        const SplitSidedness sides = split_sidedness(g.side_);
        IntervalSplit res;
        res.boundary = boundary;
        res.right_low = right_low;
        res.left = std::make_unique<GapIntervals>(*store, g.registry_, sides.left, g.low_, right_low);
        res.right = std::make_unique<GapIntervals>(*store, g.registry_, sides.right, right_low, g.high_);
        auto fill = [&](GapIntervals& dst, std::vector<IntervalItem> keep,
                        std::vector<std::unique_ptr<Interval>> fresh, bool fresh_first) {
            std::vector<IntervalItem> out;
            std::vector<IntervalItem> made;
            for (auto& p : fresh) {
                made.push_back({p->low, p->high, p->list.size(), p.get()});
                dst.adopt(std::move(p));
            }
            for (auto& it : keep) dst.adopt(std::move(g.owned_.at(it.ptr)));
            if (fresh_first) {
                out = std::move(made);
                out.insert(out.end(), keep.begin(), keep.end());
            } else {
                out = std::move(keep);
                out.insert(out.end(), made.begin(), made.end());
            }
            for (const auto& it : out) dst.size_ += it.size;
            dst.tree_.build(out);
        };
        std::vector<IntervalItem> before_items(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(idx));
        std::vector<IntervalItem> after_items(items.begin() + static_cast<std::ptrdiff_t>(idx + 1), items.end());
        fill(*res.left, std::move(before_items), std::move(left_pieces), false);
        fill(*res.right, std::move(after_items), std::move(right_pieces), true);
        g.owned_.clear();
        g.tree_.clear();
        g.size_ = 0;
        res.x_left = res.left->size_;
        res.x_right = res.right->size_;
        res.left->observer_ = g.observer_;
        res.right->observer_ = g.observer_;
        res.left->merge();
        res.right->merge();
        return res;
    }
};

inline IntervalSplit GapIntervals::split_rank(std::uint64_t k) {
    if (k < 1 || k >= size_) throw RankError("interval split rank must leave both sides nonempty");
    return IntervalSplitter::run(*this, k, nullptr);
}

inline IntervalSplit GapIntervals::split_key(const Element& probe, std::uint64_t local) {
    if (tree_.empty()) throw EmptyError("split of an empty gap");
    if (local == 0) local = count_le(probe);
    if (local == 0) throw NoPredecessorError("no element of the gap is <= the probe");
    if (local >= size_) throw ContractError("key split at the gap's right end is a boundary query");
    return IntervalSplitter::run(*this, local, &probe);
}

/// k-th smallest element (1-based) of one interval; reads its list and
/// runs deterministic selection on it.
inline Element select_by_rank(const Interval& iv, std::size_t k, BlockStore* store) {
    if (k < 1 || k > iv.list.size()) throw RankError("selection rank out of range");
    return select_kth(iv.list.read_all(), k, store);
}

} // namespace lazybtree
