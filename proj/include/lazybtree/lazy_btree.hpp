#pragma once

#include "lazybtree/block_store.hpp"
#include "lazybtree/element.hpp"
#include "lazybtree/gap_structure.hpp"
#include "lazybtree/interval_structure.hpp"
#include "lazybtree/lightweight_pool.hpp"
#include "lazybtree/packed_list.hpp"
#include "lazybtree/selection.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lazybtree {

using ElementHandle = ElemId;

struct LazyConfig {
    std::size_t block_size = 64;
    std::size_t memory = 0; ///< internal memory in elements; used when cache is on
    bool cache = false;

    std::size_t cache_blocks() const {
        if (!cache) return 0;
        return std::max<std::size_t>(1, memory / block_size);
    }
};

struct QueryResult {
    std::uint64_t rank = 0;
    ElementHandle handle = 0;
    Key key = 0;
};

enum class OpKind : std::uint8_t { construct, insert, erase, change_key, query_element, query_rank };
inline constexpr std::size_t kOpKinds = 6;

inline const char* to_string(OpKind k) {
    switch (k) {
    case OpKind::construct: return "construct";
    case OpKind::insert: return "insert";
    case OpKind::erase: return "delete";
    case OpKind::change_key: return "change_key";
    case OpKind::query_element: return "query_element";
    case OpKind::query_rank: return "query_rank";
    }
    return "?";
}

struct OpTally {
    std::uint64_t count = 0;
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    std::uint64_t total() const { return reads + writes; }
};

struct LazyStats {
    std::uint64_t n = 0;
    std::uint64_t gaps = 0;
    std::uint64_t queries = 0;
    std::uint64_t io_reads = 0;
    std::uint64_t io_writes = 0;
    std::size_t allocated_blocks = 0;
    std::array<OpTally, kOpKinds> tallies{};

    const OpTally& tally(OpKind k) const { return tallies[static_cast<std::size_t>(k)]; }
};

/// Sizes produced by a split, for telemetry and tests.
struct SplitOutcome {
    std::uint64_t before = 0;
    std::uint64_t x_left = 0;
    std::uint64_t x_right = 0;

    std::uint64_t x() const { return std::min(x_left, x_right); }
    double c() const {
        return x() == 0 ? 1.0 : static_cast<double>(std::max(x_left, x_right)) / static_cast<double>(x());
    }
};

/// What the last operation did; inputs to the cost formulas.
struct OpRecord {
    OpKind kind = OpKind::construct;
    std::uint64_t n = 0;          ///< elements before the operation
    std::uint64_t gap_weight = 0; ///< weight of the manipulated gap before the operation
    std::uint64_t q = 0;          ///< queries before the operation
    std::optional<SplitOutcome> split;
    bool toward = false;
    bool degraded = false; ///< change_key fell back to delete + insert
    IoCounters ios;
    IoCounters element_ios; ///< the part of ios spent below the gap structure
};

/**
 * Lazy B-tree: a sorted dictionary that only orders its elements as far as
 * queries force it to.
 *
 * Elements live in gaps, separated by the ranks queried so far. The gap
 * structure finds gaps by key or rank; each gap keeps its elements in
 * intervals. Gaps below B/2 elements share one blocked list instead of
 * owning an interval structure; gaps above 2B always own one.
 */
class LazyBTree {
public:
    explicit LazyBTree(const LazyConfig& cfg = {})
        : cfg_(cfg), store_(std::make_unique<BlockStore>(cfg.block_size, cfg.cache_blocks())),
          gaps_(std::make_unique<GapStructure>(*store_)), pool_(std::make_unique<LightPool>(*store_, &registry_)) {}

    LazyBTree(const LazyConfig& cfg, std::span<const Key> keys) : LazyBTree(cfg) { construct(keys); }

    LazyBTree(const LazyBTree&) = delete;
    LazyBTree& operator=(const LazyBTree&) = delete;

    ~LazyBTree() {
        // intervals and pool free their blocks; drop them before the store
        payload_.clear();
        pool_.reset();
        gaps_.reset();
    }

    const LazyConfig& config() const { return cfg_; }
    std::size_t block_size() const { return cfg_.block_size; }
    std::uint64_t size() const { return gaps_->total_weight(); }
    bool empty() const { return gaps_->empty(); }
    std::size_t gap_count() const { return gaps_->gap_count(); }
    std::uint64_t query_count() const { return q_; }
    const BlockStore& store() const { return *store_; }
    BlockStore& store() { return *store_; }
    const OpRecord& last_op() const { return last_; }

    /// Bulk load into an empty structure. Handles are 0..|keys|-1 in input order.
    void construct(std::span<const Key> keys) {
        if (!empty() || next_id_ != 0) throw ContractError("construct on a used structure");
        Scope sc(*this, OpKind::construct, 0);
        if (keys.empty()) return sc.done();
        if (keys.size() > kMaxElemId) throw ContractError("too many elements");
        store_->charge_stream(keys.size(), Access::read);
        std::vector<Element> elems;
        elems.reserve(keys.size());
        for (Key k : keys) elems.push_back({k, next_id_++});
        const GapId g = gaps_->create_initial(elems.size());
        install(g, Sidedness::zero, kBottom, kTop, elems, elems.size() >= light_limit());
        sc.done();
    }

    ElementHandle insert(Key key) {
        if (next_id_ > kMaxElemId) throw ContractError("element ids exhausted");
        const Element e{key, next_id_++};
        Scope sc(*this, OpKind::insert, 0);
        place_new(e, sc);
        sc.done();
        return e.id;
    }

    void erase(ElementHandle h) {
        Scope sc(*this, OpKind::erase, 0);
        remove(h, sc);
        sc.done();
    }

    /// Sets the key of h. Moves that leave the element's gap are carried
    /// out as delete + insert; the handle stays valid either way.
    void change_key(ElementHandle h, Key new_key) {
        Scope sc(*this, OpKind::change_key, 0);
        ListBlock* blk = lookup(h);
        store_->access(blk->id, Access::read);
        const Element old = element_in(blk, h);
        const Element moved{new_key, h};
        const GapLocation loc = gaps_->by_element(old);
        sc.rec.gap_weight = loc.weight;
        if (moved == old) return sc.done();
        if (loc.low <= moved && moved < loc.high) {
            Payload& pl = payload_.at(loc.id);
            if (pl.iv) {
                sc.rec.toward = pl.iv->change(blk, h, new_key);
            } else {
                pool_->rekey(blk, h, new_key);
                sc.rec.toward = (pl.side == Sidedness::one_left && moved < old) ||
                                (pl.side == Sidedness::one_right && old < moved);
            }
            return sc.done();
        }
        sc.rec.degraded = true;
        remove(h, sc);
        place_new(moved, sc);
        sc.done();
    }

    /// Weak predecessor of key: the largest element with key <= `key`.
    QueryResult query_element(Key key) {
        if (empty()) throw NoPredecessorError("query on an empty structure");
        Scope sc(*this, OpKind::query_element, 0);
        const Element probe = key_probe(key);
        const GapLocation loc = gaps_->by_element(probe);
        sc.rec.gap_weight = loc.weight;
        Payload& pl = payload_.at(loc.id);
        std::optional<std::vector<Element>> light;
        std::uint64_t local = 0;
        if (pl.iv) {
            local = pl.iv->count_le(probe);
        } else {
            light = pool_->gather(loc.id);
            local = static_cast<std::uint64_t>(
                std::count_if(light->begin(), light->end(), [&](const Element& e) { return e <= probe; }));
        }
        QueryResult res;
        if (local == 0) {
            if (loc.rank == 0) throw NoPredecessorError("no element with key <= " + std::to_string(key));
            const GapLocation prev = gaps_->by_rank(loc.rank);
            res = answer(loc.rank, max_of(prev.id));
        } else if (local == loc.weight) {
            res = answer(loc.rank + local, light ? *std::max_element(light->begin(), light->end()) : max_of(loc.id));
        } else {
            res = answer(loc.rank + local, split(loc, local, &probe, std::move(light), sc));
        }
        ++q_;
        sc.done();
        return res;
    }

    /// Element of rank r (1-based); the gap holding it is split after r.
    QueryResult query_rank(std::uint64_t r) {
        if (r < 1 || r > size()) throw RankError("rank " + std::to_string(r) + " outside [1, N]");
        Scope sc(*this, OpKind::query_rank, 0);
        const GapLocation loc = gaps_->by_rank(r);
        sc.rec.gap_weight = loc.weight;
        const std::uint64_t local = r - loc.rank;
        QueryResult res;
        if (local == loc.weight)
            res = answer(r, max_of(loc.id));
        else
            res = answer(r, split(loc, local, nullptr, std::nullopt, sc));
        ++q_;
        sc.done();
        return res;
    }

    /// Current key of a live handle; one read.
    Key key_of(ElementHandle h) const {
        ListBlock* blk = lookup(h);
        store_->access(blk->id, Access::read);
        return element_in(blk, h).key;
    }

    bool contains(ElementHandle h) const { return registry_.find(h) != nullptr; }

    LazyStats stats() const {
        LazyStats s;
        s.n = size();
        s.gaps = gap_count();
        s.queries = q_;
        s.io_reads = store_->counters().reads;
        s.io_writes = store_->counters().writes;
        s.allocated_blocks = store_->allocated_blocks();
        s.tallies = tallies_;
        return s;
    }

    /// Called with the record of every finished operation.
    void set_op_listener(std::function<void(const OpRecord&)> fn) { listener_ = std::move(fn); }

    void set_merge_observer(MergeObserver* obs) {
        observer_ = obs;
        for (auto& [g, pl] : payload_)
            if (pl.iv) pl.iv->set_observer(obs);
    }

    // ---- verification views, no I/O accounting ----

    struct GapInfo {
        GapId id;
        Element low;
        Element high;
        std::uint64_t weight;
        Sidedness side;
        bool light;
        std::size_t intervals; ///< 0 for light gaps
    };

    /// Gaps in key order.
    std::vector<GapInfo> gaps() const {
        auto views = gaps_->snapshot();
        std::sort(views.begin(), views.end(), [](const GapView& a, const GapView& b) { return a.low < b.low; });
        std::vector<GapInfo> out;
        for (const auto& v : views) {
            const Payload& pl = payload_.at(v.id);
            out.push_back({v.id, v.low, v.high, v.weight, pl.side, pl.iv == nullptr,
                           pl.iv ? pl.iv->interval_count() : 0});
        }
        return out;
    }

    /// Elements of one gap, unordered.
    std::vector<Element> gap_elements(GapId g) const {
        const Payload& pl = payload_.at(g);
        if (!pl.iv) return pool_->peek(g);
        std::vector<Element> out;
        for (const auto& it : pl.iv->peek())
            for (const auto& b : it.ptr->list.blocks()) out.insert(out.end(), b.elems.begin(), b.elems.end());
        return out;
    }

    /// All elements in sorted order.
    std::vector<Element> elements() const {
        std::vector<Element> out;
        for (const auto& g : gaps()) {
            auto v = gap_elements(g.id);
            std::sort(v.begin(), v.end());
            out.insert(out.end(), v.begin(), v.end());
        }
        return out;
    }

    const GapIntervals* intervals_of(GapId g) const { return payload_.at(g).iv.get(); }

    /// B times the potential: N01 plus, per interval, B + max(|I| - out, 0).
    /// A light gap counts as a single interval.
    std::uint64_t phi_scaled() const {
        const std::uint64_t b = cfg_.block_size;
        std::uint64_t phi = 0;
        for (const auto& [g, pl] : payload_) {
            const std::uint64_t w = gaps_->weight_of(g);
            if (pl.side != Sidedness::two) phi += w;
            phi += pl.iv ? pl.iv->phi_scaled() : b + w;
        }
        return phi;
    }

    /// Full consistency check of every component.
    CheckReport deep_check() const {
        CheckReport rep = gaps_->deep_check();
        const std::uint64_t b = cfg_.block_size;
        std::size_t light = 0;
        for (const auto& v : gaps_->snapshot()) {
            const std::string tag = "gap " + std::to_string(v.id) + ": ";
            auto it = payload_.find(v.id);
            if (it == payload_.end()) {
                rep.fail(tag + "no payload");
                continue;
            }
            const Payload& pl = it->second;
            if (v.weight * 2 < b && pl.iv) rep.fail(tag + "weight below B/2 but not in the shared list");
            if (v.weight > 2 * b && !pl.iv) rep.fail(tag + "weight above 2B but in the shared list");
            std::vector<Element> elems;
            if (pl.iv) {
                std::string why;
                if (pl.iv->size() != v.weight) rep.fail(tag + "interval total differs from the gap weight");
                if (pl.iv->low() != v.low || pl.iv->high() != v.high) rep.fail(tag + "interval range differs");
                if (pl.iv->sidedness() != pl.side) rep.fail(tag + "sidedness out of sync");
                if (!pl.iv->check(&why)) rep.fail(tag + why);
            } else {
                ++light;
                if (!pool_->holds(v.id)) {
                    rep.fail(tag + "light gap missing from the shared list");
                    continue;
                }
                if (pool_->weight(v.id) != v.weight) rep.fail(tag + "shared-list segment differs from the gap weight");
            }
            elems = gap_elements(v.id);
            if (elems.size() != v.weight) rep.fail(tag + "element count differs from the weight");
            for (const auto& e : elems) {
                if (e < v.low || !(e < v.high)) {
                    rep.fail(tag + "element outside the gap range");
                    break;
                }
                const ListBlock* blk = registry_.find(e.id);
                if (blk == nullptr || std::none_of(blk->elems.begin(), blk->elems.end(),
                                                   [&](const Element& x) { return x.id == e.id; })) {
                    rep.fail(tag + "handle registry does not point at the element");
                    break;
                }
            }
        }
        if (payload_.size() != gaps_->gap_count()) rep.fail("payload map and gap structure disagree");
        if (pool_->gap_count() != light) rep.fail("shared list holds stray gaps");
        std::string why;
        if (!pool_->check(&why)) rep.fail("shared list: " + why);
        if (registry_.live() != size()) rep.fail("registry size differs from N");
        if (gap_count() > std::min<std::uint64_t>(size(), q_ + 1)) rep.fail("more gaps than min(N, q+1)");
        return rep;
    }

    // ---- fault injection for checker tests ----

    GapStructure& debug_gaps() { return *gaps_; }

    /// Rewrites a key in place without any bookkeeping.
    void debug_overwrite_key(ElementHandle h, Key key) {
        ListBlock* blk = lookup(h);
        for (auto& e : blk->elems)
            if (e.id == h) e.key = key;
    }

private:
    struct Payload {
        Sidedness side = Sidedness::zero;
        std::unique_ptr<GapIntervals> iv; ///< null: the gap lives in the shared list
    };

    struct Scope {
        Scope(LazyBTree& t, OpKind k, std::uint64_t w)
            : tree(t), start(t.store_->counters()), start_element(t.store_->counters(Layer::element)) {
            rec.kind = k;
            rec.n = t.size();
            rec.gap_weight = w;
            rec.q = t.q_;
        }
        void done() {
            rec.ios = tree.store_->counters() - start;
            rec.element_ios = tree.store_->counters(Layer::element) - start_element;
            OpTally& t = tree.tallies_[static_cast<std::size_t>(rec.kind)];
            ++t.count;
            t.reads += rec.ios.reads;
            t.writes += rec.ios.writes;
            tree.last_ = rec;
            if (tree.listener_) tree.listener_(rec);
        }
        LazyBTree& tree;
        IoCounters start;
        IoCounters start_element;
        OpRecord rec;
    };

    std::size_t light_limit() const { return (cfg_.block_size + 1) / 2; }

    ListBlock* lookup(ElementHandle h) const {
        ListBlock* blk = registry_.find(h);
        if (blk == nullptr) throw NotFoundError("stale or unknown element handle " + std::to_string(h));
        return blk;
    }

    static Element element_in(const ListBlock* blk, ElementHandle h) {
        for (const auto& e : blk->elems)
            if (e.id == h) return e;
        throw CorruptionError("registry points at a block without the element");
    }

    QueryResult answer(std::uint64_t rank, const Element& e) const { return {rank, e.id, e.key}; }

    void install(GapId g, Sidedness side, Element low, Element high, const std::vector<Element>& elems, bool heavy) {
        Payload pl;
        pl.side = side;
        if (heavy) {
            pl.iv = GapIntervals::from_elements(*store_, &registry_, side, low, high, elems);
            pl.iv->set_observer(observer_);
        } else {
            pool_->add_gap(g, elems);
        }
        payload_[g] = std::move(pl);
    }

    void place_new(const Element& e, Scope& sc) {
        if (empty()) {
            const GapId g = gaps_->create_initial(1);
            install(g, Sidedness::zero, kBottom, kTop, {e}, 1 >= light_limit());
            return;
        }
        const GapLocation loc = gaps_->by_element(e);
        sc.rec.gap_weight = loc.weight;
        Payload& pl = payload_.at(loc.id);
        if (pl.iv)
            pl.iv->insert(e);
        else
            pool_->insert(loc.id, e);
        gaps_->increment(loc.id);
        rebalance(loc.id);
    }

    void remove(ElementHandle h, Scope& sc) {
        ListBlock* blk = lookup(h);
        store_->access(blk->id, Access::read);
        const Element e = element_in(blk, h);
        const GapLocation loc = gaps_->by_element(e);
        sc.rec.gap_weight = loc.weight;
        Payload& pl = payload_.at(loc.id);
        if (pl.iv)
            pl.iv->erase(blk, h);
        else
            pool_->erase(blk, h);
        const DecrementResult d = gaps_->decrement(loc.id);
        if (!d.removed) {
            rebalance(loc.id);
            return;
        }
        payload_.erase(loc.id);
        if (gaps_->empty()) return;
        Payload& ab = payload_.at(d.absorber);
        if (ab.iv) {
            if (d.absorbed_by_successor)
                ab.iv->extend_low(gaps_->low_of(d.absorber));
            else
                ab.iv->extend_high(gaps_->high_of(d.absorber));
        }
    }

    // Moves a gap between the shared list and its own interval structure.
    void rebalance(GapId g) {
        Payload& pl = payload_.at(g);
        const std::uint64_t w = gaps_->weight_of(g);
        if (pl.iv && w < light_limit()) {
            pool_->add_gap(g, pl.iv->take_all());
            pl.iv.reset();
        } else if (!pl.iv && w > 2 * cfg_.block_size) {
            const auto elems = pool_->remove_gap(g);
            pl.iv = GapIntervals::from_elements(*store_, &registry_, pl.side, gaps_->low_of(g), gaps_->high_of(g),
                                                elems);
            pl.iv->set_observer(observer_);
        }
    }

    Element max_of(GapId g) {
        const Payload& pl = payload_.at(g);
        if (pl.iv) return pl.iv->max_element();
        const auto v = pool_->gather(g);
        return *std::max_element(v.begin(), v.end());
    }

    // Splits the gap at loc after its local-th element; returns that element.
    Element split(const GapLocation& loc, std::uint64_t local, const Element* probe,
                  std::optional<std::vector<Element>> light, Scope& sc) {
        Payload& pl = payload_.at(loc.id);
        const SplitSidedness sides = split_sidedness(pl.side);
        Element boundary;
        GapId right;
        std::uint64_t xl = 0, xr = 0;
        if (pl.iv) {
            IntervalSplit res = probe ? pl.iv->split_key(*probe, local) : pl.iv->split_rank(local);
            xl = res.x_left;
            xr = res.x_right;
            boundary = res.boundary;
            right = gaps_->split(loc.id, res.right_low, xl, xr);
            pl.iv = std::move(res.left);
            pl.side = sides.left;
            payload_[right] = Payload{sides.right, std::move(res.right)};
        } else {
            std::vector<Element> elems = light ? std::move(*light) : pool_->gather(loc.id);
            if (probe) {
                boundary = kBottom;
                for (const auto& e : elems)
                    if (e <= *probe) boundary = std::max(boundary, e);
            } else {
                boundary = select_kth(elems, local, store_.get());
            }
            auto [lo, hi] = partition_at(elems, boundary, store_.get());
            xl = lo.size();
            xr = hi.size();
            right = gaps_->split(loc.id, successor(boundary), xl, xr);
            pool_->split_gap(loc.id, lo, right, hi);
            pl.side = sides.left;
            payload_[right] = Payload{sides.right, nullptr};
        }
        sc.rec.split = SplitOutcome{loc.weight, xl, xr};
        rebalance(loc.id);
        rebalance(right);
        return boundary;
    }

    LazyConfig cfg_;
    std::unique_ptr<BlockStore> store_;
    HandleRegistry registry_;
    std::unique_ptr<GapStructure> gaps_;
    std::unique_ptr<LightPool> pool_;
    std::unordered_map<GapId, Payload> payload_;
    ElemId next_id_ = 0;
    std::uint64_t q_ = 0;
    MergeObserver* observer_ = nullptr;
    std::array<OpTally, kOpKinds> tallies_{};
    OpRecord last_;
    std::function<void(const OpRecord&)> listener_;
};

} // namespace lazybtree
