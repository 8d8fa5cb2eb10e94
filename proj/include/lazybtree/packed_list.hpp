#pragma once

#include "lazybtree/block_store.hpp"
#include "lazybtree/element.hpp"

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lazybtree {

/// A run of consecutive slots in a shared block that belong to one gap.
struct Run {
    GapId gap;
    std::size_t count;
};

/// One block of a blocked list. `owner` identifies the list (or interval)
/// the block currently belongs to; `runs` is only used by the shared
/// lightweight pool.
struct ListBlock {
    BlockId id;
    std::vector<Element> elems;
    void* owner = nullptr;
    std::vector<Run> runs;
    std::list<ListBlock>::iterator self{};
};

/**
 * Resolves element ids to the block currently holding them. The registry is
 * internal-memory metadata and never charged; lookups inside the block are
 * a scan over at most B slots of an already transferred block.
 */
class HandleRegistry {
public:
    void place(ElemId id, ListBlock* blk) {
        if (id >= slots_.size()) slots_.resize(std::max<std::size_t>(id + 1, slots_.size() * 2), nullptr);
        if (slots_[id] == nullptr) ++live_;
        slots_[id] = blk;
    }

    void forget(ElemId id) {
        if (id < slots_.size() && slots_[id] != nullptr) {
            slots_[id] = nullptr;
            --live_;
        }
    }

    ListBlock* find(ElemId id) const {
        return id < slots_.size() ? slots_[id] : nullptr;
    }

    std::size_t live() const { return live_; }

    template <class Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t i = 0; i < slots_.size(); ++i)
            if (slots_[i] != nullptr) fn(ElemId{i}, slots_[i]);
    }

private:
    std::vector<ListBlock*> slots_;
    std::size_t live_ = 0;
};

inline std::size_t min_fill(std::size_t block_size) { return (block_size + 3) / 4; }

/**
 * Doubly linked chain of blocks holding an unordered bag of elements.
 *
 * Every block except head and tail holds at least ceil(B/4) elements, so a
 * list of n elements occupies at most 4n/B + 2 blocks. Concatenation and
 * splitting touch O(1) blocks beyond the ones the caller already scanned.
 */
class PackedList {
public:
    using Blocks = std::list<ListBlock>;

    PackedList(BlockStore& store, HandleRegistry* registry, void* owner = nullptr)
        : store_(&store), registry_(registry), owner_(owner) {}

    PackedList(const PackedList&) = delete;
    PackedList& operator=(const PackedList&) = delete;

    PackedList(PackedList&& other) noexcept
        : store_(other.store_), registry_(other.registry_), owner_(other.owner_),
          blocks_(std::move(other.blocks_)), count_(other.count_) {
        other.count_ = 0;
    }

    PackedList& operator=(PackedList&& other) noexcept {
        if (this != &other) {
            release();
            store_ = other.store_;
            registry_ = other.registry_;
            owner_ = other.owner_;
            blocks_ = std::move(other.blocks_);
            count_ = other.count_;
            other.count_ = 0;
        }
        return *this;
    }

    ~PackedList() { release(); }

    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }
    std::size_t block_count() const { return blocks_.size(); }
    void* owner() const { return owner_; }

    void set_owner(void* owner) {
        owner_ = owner;
        for (auto& b : blocks_) b.owner = owner;
    }

    /// Appends one element to the tail block; O(1) I/Os.
    ListBlock* append(const Element& e) {
        const std::size_t cap = store_->block_size();
        if (blocks_.empty() || blocks_.back().elems.size() >= cap) {
            new_block_at_tail();
        } else {
            store_->access(blocks_.back().id, Access::read);
            store_->access(blocks_.back().id, Access::write);
        }
        ListBlock& tail = blocks_.back();
        tail.elems.push_back(e);
        ++count_;
        if (registry_) registry_->place(e.id, &tail);
        return &tail;
    }

    /// Appends a batch, filling blocks completely; one write per block touched.
    void append_bulk(std::span<const Element> elems) {
        const std::size_t cap = store_->block_size();
        std::size_t i = 0;
        if (!blocks_.empty() && blocks_.back().elems.size() < cap && !elems.empty()) {
            store_->access(blocks_.back().id, Access::read);
            store_->access(blocks_.back().id, Access::write);
        }
        while (i < elems.size()) {
            if (blocks_.empty() || blocks_.back().elems.size() >= cap) new_block_at_tail();
            ListBlock& tail = blocks_.back();
            const std::size_t take = std::min(cap - tail.elems.size(), elems.size() - i);
            for (std::size_t j = 0; j < take; ++j) {
                tail.elems.push_back(elems[i + j]);
                if (registry_) registry_->place(elems[i + j].id, &tail);
            }
            i += take;
            count_ += take;
        }
    }

    /// Visits every element in block order; one read per block.
    template <class Visitor>
    void scan(Visitor&& visit) const {
        for (const auto& b : blocks_) {
            store_->access(b.id, Access::read);
            for (const auto& e : b.elems) visit(e);
        }
    }

    /// Reads all elements into memory; one read per block.
    std::vector<Element> read_all() const {
        std::vector<Element> out;
        out.reserve(count_);
        scan([&](const Element& e) { out.push_back(e); });
        return out;
    }

    /// Removes element `id` from `blk`, which the caller has just read.
    /// Charges the write-back and any rebalancing with a neighbor.
    void erase(ListBlock* blk, ElemId id) {
        auto it = locate(blk);
        auto& v = it->elems;
        auto pos = std::find_if(v.begin(), v.end(), [&](const Element& e) { return e.id == id; });
        if (pos == v.end())
            throw CorruptionError("element " + std::to_string(id) + " not in its registered block");
        *pos = v.back();
        v.pop_back();
        --count_;
        if (registry_) registry_->forget(id);
        if (v.empty()) {
            store_->free_block(it->id);
            blocks_.erase(it);
            return;
        }
        store_->access(it->id, Access::write);
        const bool interior = it != blocks_.begin() && std::next(it) != blocks_.end();
        if (interior && v.size() < min_fill(store_->block_size()))
            fix_junction(it, std::next(it));
    }

    /// Replaces the key of element `id` in place (block already read).
    void rekey(ListBlock* blk, ElemId id, Key key) {
        auto pos = std::find_if(blk->elems.begin(), blk->elems.end(),
                                [&](const Element& e) { return e.id == id; });
        if (pos == blk->elems.end())
            throw CorruptionError("element " + std::to_string(id) + " not in its registered block");
        pos->key = key;
        store_->access(blk->id, Access::write);
    }

    /// Splices `other` onto the end of this list. O(1) I/Os.
    void concat(PackedList&& other) {
        if (other.blocks_.empty()) return;
        for (auto& b : other.blocks_) b.owner = owner_;
        if (blocks_.empty()) {
            blocks_.splice(blocks_.end(), other.blocks_);
            count_ = other.count_;
            other.count_ = 0;
            return;
        }
        auto junction = std::prev(blocks_.end());
        blocks_.splice(blocks_.end(), other.blocks_);
        count_ += other.count_;
        other.count_ = 0;
        fix_junction(junction, std::next(junction));
    }

    /// Splits off and returns the suffix after the first k elements in block
    /// order. Walks to the split block (one read per block passed).
    PackedList split_at(std::size_t k) {
        if (k > count_) throw RankError("split position beyond list size");
        PackedList suffix(*store_, registry_, owner_);
        if (k == count_) return suffix;
        if (k == 0) {
            suffix.blocks_.splice(suffix.blocks_.end(), blocks_);
            suffix.count_ = count_;
            count_ = 0;
            return suffix;
        }
        std::size_t seen = 0;
        auto it = blocks_.begin();
        for (;; ++it) {
            store_->access(it->id, Access::read);
            if (seen + it->elems.size() >= k) break;
            seen += it->elems.size();
        }
        const std::size_t local = k - seen;
        auto first_moved = std::next(it);
        if (local < it->elems.size()) {
            ListBlock fresh{store_->alloc_block(), {}, owner_, {}};
            fresh.elems.assign(it->elems.begin() + static_cast<std::ptrdiff_t>(local), it->elems.end());
            it->elems.resize(local);
            store_->access(it->id, Access::write);
            first_moved = blocks_.insert(std::next(it), std::move(fresh));
            first_moved->self = first_moved;
            if (registry_)
                for (const auto& e : first_moved->elems) registry_->place(e.id, &*first_moved);
        }
        suffix.blocks_.splice(suffix.blocks_.end(), blocks_, first_moved, blocks_.end());
        suffix.count_ = count_ - k;
        count_ = k;
        return suffix;
    }

    /// Frees all blocks and returns the elements (one read per block).
    std::vector<Element> take_all() {
        std::vector<Element> out = read_all();
        release();
        return out;
    }

    const Blocks& blocks() const { return blocks_; }

    /// Fill-rule and count consistency; not I/O-accounted.
    bool check(std::string* why = nullptr) const {
        std::size_t total = 0;
        const std::size_t cap = store_->block_size();
        std::size_t i = 0;
        for (auto it = blocks_.begin(); it != blocks_.end(); ++it, ++i) {
            const bool interior = i != 0 && std::next(it) != blocks_.end();
            if (it->elems.empty() || it->elems.size() > cap ||
                (interior && it->elems.size() < min_fill(cap))) {
                if (why) *why = "block fill rule violated";
                return false;
            }
            if (it->owner != owner_) {
                if (why) *why = "block owner tag stale";
                return false;
            }
            total += it->elems.size();
        }
        if (total != count_) {
            if (why) *why = "stored count differs from block contents";
            return false;
        }
        return true;
    }

private:
    void new_block_at_tail() {
        blocks_.push_back(ListBlock{store_->alloc_block(), {}, owner_, {}});
        blocks_.back().self = std::prev(blocks_.end());
        blocks_.back().elems.reserve(store_->block_size());
    }

    Blocks::iterator locate(ListBlock* blk) {
        if (blk->owner != owner_) throw CorruptionError("block not owned by this list");
        return blk->self;
    }

    void fix_junction(Blocks::iterator a, Blocks::iterator b) {
        const std::size_t cap = store_->block_size();
        const std::size_t lo = min_fill(cap);
        store_->access(a->id, Access::read);
        store_->access(b->id, Access::read);
        if (a->elems.size() + b->elems.size() <= cap) {
            for (const auto& e : b->elems) {
                a->elems.push_back(e);
                if (registry_) registry_->place(e.id, &*a);
            }
            store_->access(a->id, Access::write);
            store_->free_block(b->id);
            blocks_.erase(b);
            return;
        }
        auto move_some = [&](ListBlock& from, ListBlock& to, std::size_t n) {
            for (std::size_t j = 0; j < n; ++j) {
                to.elems.push_back(from.elems.back());
                if (registry_) registry_->place(from.elems.back().id, &to);
                from.elems.pop_back();
            }
            store_->access(from.id, Access::write);
            store_->access(to.id, Access::write);
        };
        if (a->elems.size() < lo) move_some(*b, *a, lo - a->elems.size());
        else if (b->elems.size() < lo) move_some(*a, *b, lo - b->elems.size());
    }

    void release() {
        if (store_ == nullptr) return;
        for (auto& b : blocks_) {
            if (registry_)
                for (const auto& e : b.elems)
                    if (registry_->find(e.id) == &b) registry_->forget(e.id);
            store_->free_block(b.id);
        }
        blocks_.clear();
        count_ = 0;
    }

    BlockStore* store_;
    HandleRegistry* registry_;
    void* owner_;
    Blocks blocks_;
    std::size_t count_ = 0;
};

} // namespace lazybtree
