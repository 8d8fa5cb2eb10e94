#pragma once

#include "lazybtree/aug_btree.hpp"
#include "lazybtree/block_store.hpp"
#include "lazybtree/element.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lazybtree {

/// One gap as stored in a bucket tree. hole_before is the weight of the
/// hole between the previous gap of the same bucket and this one.
struct GapItem {
    Element low;
    Element high;
    std::uint64_t weight = 0;
    std::uint64_t hole_before = 0;
    GapId id = 0;
};

struct GapSummary {
    Element first_low;
    Element last_low;
    std::uint64_t count = 0;
    std::uint64_t weight = 0;
    std::uint64_t holes = 0;
    std::uint64_t min_w = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t max_w = 0;

    friend bool operator==(const GapSummary&, const GapSummary&) = default;
};

struct GapTraits {
    using Item = GapItem;
    using Summary = GapSummary;

    static Summary of(const Item& it) {
        return {it.low, it.low, 1, it.weight, it.hole_before, it.weight, it.weight};
    }
    static Summary identity() { return {}; }
    static Summary combine(const Summary& a, const Summary& b) {
        if (a.count == 0) return b;
        if (b.count == 0) return a;
        return {a.first_low,         b.last_low,
                a.count + b.count,   a.weight + b.weight,
                a.holes + b.holes,   std::min(a.min_w, b.min_w),
                std::max(a.max_w, b.max_w)};
    }
};

/// Result of a gap search.
struct GapLocation {
    GapId id = 0;
    Element low;
    Element high;
    std::uint64_t weight = 0;
    std::uint64_t rank = 0; ///< elements in all gaps before this one
    std::size_t bucket = 0;
    std::size_t buckets_visited = 0;
};

/// Uncharged view of one gap for verification.
struct GapView {
    GapId id;
    Element low;
    Element high;
    std::uint64_t weight;
    std::size_t bucket;
};

struct DecrementResult {
    bool removed = false;
    GapId absorber = 0;     ///< gap that took over the range, if removed
    bool absorbed_by_successor = true;
};

struct CheckReport {
    bool ok = true;
    std::vector<std::string> problems;

    void fail(std::string msg) {
        ok = false;
        if (problems.size() < 16) problems.push_back(std::move(msg));
    }
};

/**
 * Weighted gaps in weight-sorted buckets of doubly exponential capacity.
 *
 * Bucket j holds B^(2^j) gaps (the last one fewer), each bucket a B-tree
 * ordered by range. Heavier gaps sit in earlier buckets, so a gap of weight
 * w is found after visiting O(log log (W/w)) buckets. Holes record the
 * weight that later buckets hold between two gaps of one bucket, which
 * yields global ranks without looking at later buckets.
 */
class GapStructure {
public:
    using Tree = AugBTree<GapTraits>;
    using Path = Tree::Path;

    explicit GapStructure(BlockStore& store)
        : store_(&store), fanout_(std::max<std::size_t>(4, store.block_size())) {}

    GapStructure(const GapStructure&) = delete;
    GapStructure& operator=(const GapStructure&) = delete;
    GapStructure(GapStructure&&) = default;
    GapStructure& operator=(GapStructure&&) = default;

    std::size_t gap_count() const { return where_.size(); }
    std::uint64_t total_weight() const { return total_; }
    std::size_t bucket_count() const { return buckets_.size(); }
    bool empty() const { return where_.empty(); }
    bool contains(GapId id) const { return where_.contains(id); }

    std::size_t bucket_size(std::size_t j) const { return buckets_.at(j)->tree.size(); }

    std::uint64_t capacity(std::size_t j) const {
        std::uint64_t c = fanout_;
        for (std::size_t i = 0; i < j; ++i) {
            if (c > std::numeric_limits<std::uint32_t>::max()) return std::numeric_limits<std::uint64_t>::max();
            c *= c;
        }
        return c;
    }

    std::size_t node_count() const {
        std::size_t n = 0;
        for (const auto& b : buckets_) n += b->tree.node_count();
        return n;
    }

    std::uint64_t weight_of(GapId id) const { return loc(id).weight; }
    Element low_of(GapId id) const { return loc(id).low; }
    Element high_of(GapId id) const { return loc(id).high; }
    std::size_t bucket_of(GapId id) const { return loc(id).bucket; }

    /// Creates the single gap covering everything; structure must be empty.
    GapId create_initial(std::uint64_t weight) {
        const LayerScope layer(*store_, Layer::gap);
        if (!empty()) throw ContractError("initial gap on a nonempty gap structure");
        if (weight == 0) throw ContractError("gap weight must be positive");
        const GapId id = next_id_++;
        buckets_.push_back(std::make_unique<Bucket>(*store_, fanout_));
        Tree& t = buckets_[0]->tree;
        t.insert(t.leftmost(), GapItem{kBottom, kTop, weight, 0, id});
        where_[id] = {0, kBottom, kTop, weight};
        total_ = weight;
        return id;
    }

    /// Gap whose range contains e, with its global rank.
    GapLocation by_element(const Element& e) const {
        const LayerScope layer(*store_, Layer::gap);
        if (empty()) throw EmptyError("gap search on an empty structure");
        std::uint64_t base = 0;
        for (std::size_t j = 0; j < buckets_.size(); ++j) {
            Probe pr = probe(j, e);
            if (pr.pred && e < pr.pred->high) {
                const GapItem& g = *pr.pred;
                return {g.id, g.low, g.high, g.weight,
                        base + pr.weight_before + pr.holes_before + g.hole_before, j, j + 1};
            }
            if (pr.pred) base += pr.weight_before + pr.pred->weight;
        }
        throw CorruptionError("no bucket contains the searched point");
    }

    /// Gap holding the element of global rank r (1-based).
    GapLocation by_rank(std::uint64_t r) const {
        const LayerScope layer(*store_, Layer::gap);
        if (r < 1 || r > total_) throw RankError("rank " + std::to_string(r) + " outside [1, W]");
        std::uint64_t base = 0;
        std::uint64_t rem = r;
        for (std::size_t j = 0; j < buckets_.size(); ++j) {
            const Tree& t = buckets_[j]->tree;
            const GapSummary tot = t.total();
            if (rem > tot.weight + tot.holes) {
                // trailing hole
                rem -= tot.weight;
                base += tot.weight;
                continue;
            }
            std::uint64_t left = rem;
            std::uint64_t skipped_w = 0, skipped_h = 0;
            bool in_gap = false;
            Path p = t.descend(
                [&](std::span<const GapSummary> sums) {
                    for (std::size_t c = 0; c + 1 < sums.size(); ++c) {
                        const std::uint64_t span = sums[c].weight + sums[c].holes;
                        if (left <= span) return c;
                        left -= span;
                        skipped_w += sums[c].weight;
                        skipped_h += sums[c].holes;
                    }
                    return sums.size() - 1;
                },
                [&](std::span<const GapItem> items) {
                    for (std::size_t i = 0; i < items.size(); ++i) {
                        if (left <= items[i].hole_before) return i;
                        left -= items[i].hole_before;
                        skipped_h += items[i].hole_before;
                        if (left <= items[i].weight) {
                            in_gap = true;
                            return i;
                        }
                        left -= items[i].weight;
                        skipped_w += items[i].weight;
                    }
                    return items.size();
                });
            if (!p.at_item()) throw CorruptionError("rank descent ran past the bucket");
            if (in_gap) {
                const GapItem& g = p.item();
                return {g.id, g.low, g.high, g.weight, base + skipped_w + skipped_h, j, j + 1};
            }
            rem -= skipped_w;
            base += skipped_w;
        }
        throw CorruptionError("rank not covered by any bucket");
    }

    GapLocation locate(GapId id) const { return by_element(loc(id).low); }

    void increment(GapId id) {
        const LayerScope layer(*store_, Layer::gap);
        Loc& l = loc(id);
        std::size_t k = l.bucket;
        Tree& t = buckets_[k]->tree;
        t.update(find_exact(k, l.low), [](GapItem& g) { ++g.weight; });
        ++l.weight;
        ++total_;
        adjust_holes_before(k, l.low, +1);
        while (k > 0 && l.weight > buckets_[k - 1]->tree.total().min_w) {
            swap_across(k - 1, lightest(k - 1), id);
            --k;
        }
    }

    DecrementResult decrement(GapId id) {
        const LayerScope layer(*store_, Layer::gap);
        Loc& l = loc(id);
        if (l.weight == 0) throw CorruptionError("decrement of a weightless gap");
        std::size_t k = l.bucket;
        buckets_[k]->tree.update(find_exact(k, l.low), [](GapItem& g) { --g.weight; });
        --l.weight;
        --total_;
        adjust_holes_before(k, l.low, -1);
        if (l.weight > 0) {
            while (k + 1 < buckets_.size() && l.weight < buckets_[k + 1]->tree.total().max_w) {
                swap_across(k, id, heaviest(k + 1));
                ++k;
            }
            return {};
        }
        while (k + 1 < buckets_.size()) {
            swap_across(k, id, heaviest(k + 1));
            ++k;
        }
        const Element low = l.low;
        const Element high = l.high;
        remove_gap(k, id, false);
        where_.erase(id);
        if (buckets_.back()->tree.empty()) buckets_.pop_back();
        DecrementResult res;
        res.removed = true;
        if (where_.empty()) return res;
        if (high != kTop) {
            const GapLocation s = by_element(high);
            rewrite(s.id, [&](GapItem& g) { g.low = low; });
            res.absorber = s.id;
            res.absorbed_by_successor = true;
        } else {
            const GapLocation p = by_element(predecessor(low));
            rewrite(p.id, [&](GapItem& g) { g.high = high; });
            res.absorber = p.id;
            res.absorbed_by_successor = false;
        }
        return res;
    }

    /// Splits gap id at right_low into [low, right_low) of weight xl and
    /// [right_low, high) of weight xr. The left part keeps the id.
    GapId split(GapId id, const Element& right_low, std::uint64_t xl, std::uint64_t xr) {
        const LayerScope layer(*store_, Layer::gap);
        Loc& l = loc(id);
        if (xl == 0 || xr == 0) throw ContractError("degenerate gap split with an empty side");
        if (xl + xr != l.weight) throw ContractError("split weights do not add up to the gap weight");
        if (!(l.low < right_low && right_low < l.high)) throw ContractError("split point outside the gap range");
        const Element high = l.high;
        std::size_t k = l.bucket;
        adjust_holes_before(k, l.low, -static_cast<std::int64_t>(xr));
        buckets_[k]->tree.update(find_exact(k, l.low), [&](GapItem& g) {
            g.weight = xl;
            g.high = right_low;
        });
        l.weight = xl;
        l.high = right_low;
        total_ -= xr;
        while (k + 1 < buckets_.size() && xl < buckets_[k + 1]->tree.total().max_w) {
            swap_across(k, id, heaviest(k + 1));
            ++k;
        }
        std::size_t target = buckets_.size() - 1;
        if (buckets_[target]->tree.size() >= capacity(target)) {
            buckets_.push_back(std::make_unique<Bucket>(*store_, fanout_));
            ++target;
        }
        const std::uint64_t rank_left = by_element(l.low).rank;
        adjust_holes_before(target, right_low, static_cast<std::int64_t>(xr));
        total_ += xr;
        const GapId nid = next_id_++;
        GapItem item{right_low, high, xr, 0, nid};
        where_[nid] = {target, right_low, high, xr};
        insert_gap(target, item, rank_left + xl, false);
        std::size_t t = target;
        while (t > 0 && xr > buckets_[t - 1]->tree.total().min_w) {
            swap_across(t - 1, lightest(t - 1), nid);
            --t;
        }
        return nid;
    }

    /// All gaps in range order; uncharged.
    std::vector<GapView> snapshot() const {
        std::vector<GapView> out;
        for (std::size_t j = 0; j < buckets_.size(); ++j)
            for (const auto& g : buckets_[j]->tree.peek_items())
                out.push_back({g.id, g.low, g.high, g.weight, j});
        std::sort(out.begin(), out.end(), [](const GapView& a, const GapView& b) { return a.low < b.low; });
        return out;
    }

    /// Brute-force verification of every structural invariant; uncharged.
    CheckReport deep_check() const {
        CheckReport rep;
        std::uint64_t sum = 0;
        std::size_t gaps = 0;
        std::vector<std::vector<GapItem>> items(buckets_.size());
        for (std::size_t j = 0; j < buckets_.size(); ++j) {
            const Tree& t = buckets_[j]->tree;
            std::string why;
            if (!t.check(&why)) rep.fail("bucket " + std::to_string(j) + ": " + why);
            items[j] = t.peek_items();
            const std::uint64_t cap = capacity(j);
            const bool last = j + 1 == buckets_.size();
            if ((!last && items[j].size() != cap) || (last && (items[j].empty() || items[j].size() > cap)))
                rep.fail("bucket " + std::to_string(j) + " size " + std::to_string(items[j].size()) +
                         " violates capacity " + std::to_string(cap));
            for (std::size_t i = 0; i < items[j].size(); ++i) {
                const GapItem& g = items[j][i];
                if (i > 0 && !(items[j][i - 1].low < g.low)) rep.fail("bucket order broken");
                if (g.weight == 0) rep.fail("gap " + std::to_string(g.id) + " has weight 0");
                auto it = where_.find(g.id);
                if (it == where_.end() || it->second.bucket != j || it->second.low != g.low ||
                    it->second.high != g.high || it->second.weight != g.weight)
                    rep.fail("location map stale for gap " + std::to_string(g.id));
                sum += g.weight;
                ++gaps;
            }
            if (j > 0 && !items[j].empty() && !items[j - 1].empty() &&
                t.total().max_w > buckets_[j - 1]->tree.total().min_w)
                rep.fail("weight sorting violated between buckets " + std::to_string(j - 1) + " and " +
                         std::to_string(j));
        }
        if (gaps != where_.size()) rep.fail("location map size differs from gap count");
        if (sum != total_) rep.fail("total weight differs from the sum of gap weights");

        auto all = snapshot();
        if (!all.empty()) {
            if (all.front().low != kBottom) rep.fail("first gap does not start at the bottom");
            if (all.back().high != kTop) rep.fail("last gap does not end at the top");
            for (std::size_t i = 0; i < all.size(); ++i) {
                if (!(all[i].low < all[i].high)) rep.fail("empty gap range");
                if (i + 1 < all.size() && all[i].high != all[i + 1].low) rep.fail("gap ranges do not partition");
            }
        }

        // hole weights: later-bucket weight inside each hole span
        std::vector<std::pair<Element, std::uint64_t>> later; // (low, weight), sorted
        std::vector<std::uint64_t> prefix;
        for (std::size_t j = buckets_.size(); j-- > 0;) {
            prefix.assign(1, 0);
            for (const auto& [lo, w] : later) prefix.push_back(prefix.back() + w);
            auto weight_below = [&](const Element& e) {
                auto pos = std::lower_bound(later.begin(), later.end(), e,
                                            [](const auto& a, const Element& x) { return a.first < x; });
                return prefix[static_cast<std::size_t>(pos - later.begin())];
            };
            std::uint64_t prev = 0;
            for (const auto& g : items[j]) {
                const std::uint64_t upto = weight_below(g.low);
                if (g.hole_before != upto - prev)
                    rep.fail("hole before gap " + std::to_string(g.id) + " in bucket " + std::to_string(j) +
                             " is " + std::to_string(g.hole_before) + ", expected " + std::to_string(upto - prev));
                prev = upto;
            }
            if (buckets_[j]->trailing_hole != prefix.back() - prev)
                rep.fail("trailing hole of bucket " + std::to_string(j) + " is " +
                         std::to_string(buckets_[j]->trailing_hole) + ", expected " +
                         std::to_string(prefix.back() - prev));
            for (const auto& g : items[j]) later.emplace_back(g.low, g.weight);
            std::sort(later.begin(), later.end());
        }

        // global ranks equal prefix sums
        std::vector<std::vector<std::uint64_t>> wpre(items.size()), hpre(items.size());
        for (std::size_t j = 0; j < items.size(); ++j) {
            wpre[j].assign(1, 0);
            hpre[j].assign(1, 0);
            for (const auto& g : items[j]) {
                wpre[j].push_back(wpre[j].back() + g.weight);
                hpre[j].push_back(hpre[j].back() + g.hole_before);
            }
        }
        std::uint64_t acc = 0;
        for (const auto& v : all) {
            std::uint64_t base = 0;
            bool found = false;
            for (std::size_t j = 0; j < items.size() && !found; ++j) {
                const auto& its = items[j];
                auto pos = std::upper_bound(its.begin(), its.end(), v.low,
                                            [](const Element& e, const GapItem& g) { return e < g.low; });
                const std::size_t i = static_cast<std::size_t>(pos - its.begin());
                if (i > 0 && its[i - 1].id == v.id) {
                    const std::uint64_t rank = base + wpre[j][i - 1] + hpre[j][i];
                    if (rank != acc)
                        rep.fail("rank of gap " + std::to_string(v.id) + " is " + std::to_string(rank) +
                                 ", prefix sum " + std::to_string(acc));
                    found = true;
                }
                base += wpre[j][i];
            }
            if (!found) rep.fail("gap " + std::to_string(v.id) + " not reachable by search");
            acc += v.weight;
        }
        return rep;
    }

    /// Test hook: silently skews one stored hole weight.
    void debug_corrupt_hole(GapId id, std::int64_t delta) {
        const Loc& l = loc(id);
        Path p = find_exact(l.bucket, l.low);
        buckets_[l.bucket]->tree.update(p, [&](GapItem& g) { g.hole_before += static_cast<std::uint64_t>(delta); });
    }

private:
    struct Bucket {
        Bucket(BlockStore& s, std::size_t fanout) : tree(s, fanout) {}
        Tree tree;
        std::uint64_t trailing_hole = 0;
    };

    struct Loc {
        std::size_t bucket;
        Element low;
        Element high;
        std::uint64_t weight;
    };

    struct Probe {
        const GapItem* pred = nullptr; // last gap with low <= e
        std::uint64_t weight_before = 0;
        std::uint64_t holes_before = 0;
    };

    struct HoleRef {
        Path path;          // insertion point; at_item() iff not the trailing hole
        std::uint64_t value = 0;
        std::uint64_t holes_prefix = 0; // holes strictly before this one
    };

    Loc& loc(GapId id) {
        auto it = where_.find(id);
        if (it == where_.end()) throw NotFoundError("unknown gap " + std::to_string(id));
        return it->second;
    }
    const Loc& loc(GapId id) const {
        auto it = where_.find(id);
        if (it == where_.end()) throw NotFoundError("unknown gap " + std::to_string(id));
        return it->second;
    }

    Probe probe(std::size_t j, const Element& e) const {
        Probe pr;
        const Tree& t = buckets_[j]->tree;
        Path p = t.descend(
            [&](std::span<const GapSummary> sums) {
                std::size_t c = 0;
                while (c + 1 < sums.size() && sums[c + 1].first_low <= e) ++c;
                for (std::size_t i = 0; i < c; ++i) {
                    pr.weight_before += sums[i].weight;
                    pr.holes_before += sums[i].holes;
                }
                return c;
            },
            [&](std::span<const GapItem> items) {
                std::size_t i = 0;
                while (i < items.size() && items[i].low <= e) ++i;
                if (i == 0) return items.size();
                for (std::size_t k = 0; k + 1 < i; ++k) {
                    pr.weight_before += items[k].weight;
                    pr.holes_before += items[k].hole_before;
                }
                return i - 1;
            });
        if (p.at_item()) pr.pred = &p.item();
        return pr;
    }

    Path find_exact(std::size_t j, const Element& low) {
        const Tree& t = buckets_[j]->tree;
        Path p = t.descend(
            [&](std::span<const GapSummary> sums) {
                std::size_t c = 0;
                while (c + 1 < sums.size() && sums[c + 1].first_low <= low) ++c;
                return c;
            },
            [&](std::span<const GapItem> items) {
                std::size_t i = 0;
                while (i < items.size() && items[i].low < low) ++i;
                return i;
            });
        if (!p.at_item() || p.item().low != low) throw CorruptionError("gap missing from its bucket");
        return p;
    }

    // Hole of bucket j whose span contains e: the one before the first gap
    // with low > e, or the trailing hole.
    HoleRef hole_at(std::size_t j, const Element& e) {
        HoleRef h;
        const Tree& t = buckets_[j]->tree;
        h.path = t.descend(
            [&](std::span<const GapSummary> sums) {
                std::size_t c = 0;
                while (c + 1 < sums.size() && sums[c].last_low <= e) {
                    h.holes_prefix += sums[c].holes;
                    ++c;
                }
                return c;
            },
            [&](std::span<const GapItem> items) {
                std::size_t i = 0;
                while (i < items.size() && items[i].low <= e) {
                    h.holes_prefix += items[i].hole_before;
                    ++i;
                }
                return i;
            });
        h.value = h.path.at_item() ? h.path.item().hole_before : buckets_[j]->trailing_hole;
        return h;
    }

    void set_hole(std::size_t j, const HoleRef& h, std::uint64_t value) {
        if (h.path.at_item())
            buckets_[j]->tree.update(h.path, [&](GapItem& g) { g.hole_before = value; });
        else
            buckets_[j]->trailing_hole = value;
    }

    void adjust_holes_before(std::size_t k, const Element& e, std::int64_t delta) {
        for (std::size_t j = 0; j < k; ++j) {
            HoleRef h = hole_at(j, e);
            set_hole(j, h, h.value + static_cast<std::uint64_t>(delta));
        }
    }

    std::uint64_t local_weight_below(std::size_t j, const Element& e) const {
        Probe pr = probe(j, e);
        return pr.pred ? pr.weight_before + pr.pred->weight : 0;
    }

    GapId extreme(std::size_t j, bool lightest_one) const {
        const Tree& t = buckets_[j]->tree;
        const GapSummary tot = t.total();
        const std::uint64_t want = lightest_one ? tot.min_w : tot.max_w;
        Path p = t.descend(
            [&](std::span<const GapSummary> sums) {
                for (std::size_t c = 0; c < sums.size(); ++c)
                    if ((lightest_one ? sums[c].min_w : sums[c].max_w) == want) return c;
                throw CorruptionError("extreme weight missing from child summaries");
            },
            [&](std::span<const GapItem> items) {
                for (std::size_t i = 0; i < items.size(); ++i)
                    if (items[i].weight == want) return i;
                throw CorruptionError("extreme weight missing from leaf");
            });
        return p.item().id;
    }

    GapId lightest(std::size_t j) const { return extreme(j, true); }
    GapId heaviest(std::size_t j) const { return extreme(j, false); }

    // Removes gap id from bucket j, merging its neighboring holes. When the
    // gap moves to a later bucket its weight joins the merged hole.
    void remove_gap(std::size_t j, GapId id, bool weight_into_hole) {
        const Loc& l = loc(id);
        Tree& t = buckets_[j]->tree;
        GapItem g = t.erase(find_exact(j, l.low));
        HoleRef h = hole_at(j, g.low);
        set_hole(j, h, h.value + g.hole_before + (weight_into_hole ? g.weight : 0));
    }

    // Inserts g into bucket j given its global rank. counted_in_hole: g's
    // weight is currently part of the hole it lands in (it came from a
    // later bucket).
    void insert_gap(std::size_t j, GapItem g, std::uint64_t rank, bool counted_in_hole) {
        std::uint64_t earlier = 0;
        for (std::size_t i = 0; i <= j; ++i) earlier += local_weight_below(i, g.low);
        const std::uint64_t later_before = rank - earlier;
        HoleRef h = hole_at(j, g.low);
        const std::uint64_t before = later_before - h.holes_prefix;
        const std::uint64_t after = h.value - before - (counted_in_hole ? g.weight : 0);
        set_hole(j, h, after);
        g.hole_before = before;
        buckets_[j]->tree.insert(h.path, g);
        loc(g.id).bucket = j;
    }

    // Exchanges a (in bucket j) with b (in bucket j + 1).
    void swap_across(std::size_t j, GapId a, GapId b) {
        const std::uint64_t ra = by_element(loc(a).low).rank;
        const std::uint64_t rb = by_element(loc(b).low).rank;
        const Loc la = loc(a);
        const Loc lb = loc(b);
        remove_gap(j + 1, b, false);
        remove_gap(j, a, true);
        insert_gap(j, GapItem{lb.low, lb.high, lb.weight, 0, b}, rb, true);
        insert_gap(j + 1, GapItem{la.low, la.high, la.weight, 0, a}, ra, false);
    }

    template <class Fn>
    void rewrite(GapId id, Fn&& fn) {
        Loc& l = loc(id);
        const std::size_t j = l.bucket;
        Path p = find_exact(j, l.low);
        buckets_[j]->tree.update(p, fn);
        l.low = p.item().low;
        l.high = p.item().high;
    }

    BlockStore* store_;
    std::size_t fanout_;
    std::vector<std::unique_ptr<Bucket>> buckets_;
    std::unordered_map<GapId, Loc> where_;
    GapId next_id_ = 0;
    std::uint64_t total_ = 0;
};

} // namespace lazybtree
