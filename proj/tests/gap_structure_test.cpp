#include "lazybtree/gap_structure.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace lazybtree;

namespace {

struct RefGap {
    GapId id;
    Element low, high;
    std::uint64_t w;
};

// Element-ordered reference of gaps, maintained by the same operations.
class Reference {
public:
    std::vector<RefGap> gaps;

    std::size_t index_of(GapId id) const {
        for (std::size_t i = 0; i < gaps.size(); ++i)
            if (gaps[i].id == id) return i;
        throw std::logic_error("missing");
    }
    std::uint64_t rank_of(std::size_t i) const {
        std::uint64_t r = 0;
        for (std::size_t k = 0; k < i; ++k) r += gaps[k].w;
        return r;
    }
    std::size_t containing(const Element& e) const {
        for (std::size_t i = 0; i < gaps.size(); ++i)
            if (gaps[i].low <= e && e < gaps[i].high) return i;
        throw std::logic_error("uncovered");
    }
    std::uint64_t total() const { return rank_of(gaps.size()); }
};

void expect_same(const GapStructure& gs, const Reference& ref) {
    auto snap = gs.snapshot();
    ASSERT_EQ(snap.size(), ref.gaps.size());
    for (std::size_t i = 0; i < snap.size(); ++i) {
        ASSERT_EQ(snap[i].id, ref.gaps[i].id);
        ASSERT_EQ(snap[i].low, ref.gaps[i].low);
        ASSERT_EQ(snap[i].high, ref.gaps[i].high);
        ASSERT_EQ(snap[i].weight, ref.gaps[i].w);
    }
    auto rep = gs.deep_check();
    ASSERT_TRUE(rep.ok) << rep.problems.front();
}

// Buckets must equal a fresh weight-sorted assignment up to ties.
void expect_rebucketing_matches(const GapStructure& gs) {
    auto snap = gs.snapshot();
    std::vector<std::uint64_t> sorted_w;
    for (auto& g : snap) sorted_w.push_back(g.weight);
    std::sort(sorted_w.rbegin(), sorted_w.rend());
    std::size_t pos = 0;
    for (std::size_t j = 0; j < gs.bucket_count(); ++j) {
        std::vector<std::uint64_t> mine;
        for (auto& g : snap)
            if (g.bucket == j) mine.push_back(g.weight);
        std::sort(mine.rbegin(), mine.rend());
        for (auto w : mine) ASSERT_EQ(w, sorted_w[pos++]) << "bucket " << j;
    }
}

} // namespace

TEST(GapStructure, SingleGapCoversEverything) {
    BlockStore s(4);
    GapStructure gs(s);
    GapId g = gs.create_initial(7);
    auto loc = gs.by_element({123456, 9});
    EXPECT_EQ(loc.id, g);
    EXPECT_EQ(loc.rank, 0u);
    EXPECT_TRUE(gs.deep_check().ok);
}

TEST(GapStructure, TwoGapsByElementAndRank) {
    BlockStore s(4);
    GapStructure gs(s);
    GapId a = gs.create_initial(8);
    GapId b = gs.split(a, {10, 0}, 5, 3);
    auto loc = gs.by_element({12, 0});
    EXPECT_EQ(loc.id, b);
    EXPECT_EQ(loc.rank, 5u);
    EXPECT_EQ(gs.by_rank(6).id, b);
    EXPECT_EQ(gs.by_rank(5).id, a);
    EXPECT_EQ(gs.by_rank(1).id, a);
    EXPECT_THROW(gs.by_rank(0), RankError);
    EXPECT_THROW(gs.by_rank(9), RankError);
}

TEST(GapStructure, SplitThreeFive) {
    BlockStore s(4);
    GapStructure gs(s);
    GapId a = gs.create_initial(8);
    GapId b = gs.split(a, {50, 0}, 3, 5);
    EXPECT_EQ(gs.gap_count(), 2u);
    EXPECT_EQ(gs.weight_of(a), 3u);
    EXPECT_EQ(gs.weight_of(b), 5u);
    auto snap = gs.snapshot();
    EXPECT_EQ(snap[0].low, kBottom);
    EXPECT_EQ(snap[0].high, (Element{50, 0}));
    EXPECT_EQ(snap[1].high, kTop);
    EXPECT_THROW(gs.split(a, {20, 0}, 3, 0), ContractError);
    EXPECT_THROW(gs.split(a, {60, 0}, 1, 2), ContractError);
}

TEST(GapStructure, IncrementWithoutSwap) {
    BlockStore s(4);
    GapStructure gs(s);
    GapId a = gs.create_initial(4);
    gs.split(a, {10, 0}, 2, 2);
    gs.increment(a);
    EXPECT_EQ(gs.weight_of(a), 3u);
    EXPECT_EQ(gs.bucket_count(), 1u);
    EXPECT_TRUE(gs.deep_check().ok);
}

TEST(GapStructure, IncrementSwapsIntoEarlierBucket) {
    BlockStore s(4);
    GapStructure gs(s);
    GapId first = gs.create_initial(100);
    std::vector<GapId> ids{first};
    // five gaps: bucket 0 holds four, bucket 1 one
    for (std::uint64_t k = 1; k <= 4; ++k) ids.push_back(gs.split(first, {500 - k * 100, 0}, gs.weight_of(first) - 20 + k, 20 - k));
    ASSERT_EQ(gs.bucket_count(), 2u);
    GapId late = 0;
    for (auto id : ids)
        if (gs.bucket_of(id) == 1) late = id;
    const std::uint64_t target = gs.deep_check().ok ? 0 : 1;
    ASSERT_EQ(target, 0u);
    std::uint64_t min0 = UINT64_MAX;
    for (auto& g : gs.snapshot())
        if (g.bucket == 0) min0 = std::min(min0, g.weight);
    while (gs.weight_of(late) <= min0) gs.increment(late);
    EXPECT_EQ(gs.bucket_of(late), 0u);
    expect_rebucketing_matches(gs);
    EXPECT_TRUE(gs.deep_check().ok);
}

TEST(GapStructure, DecrementRemovesAndAbsorbs) {
    BlockStore s(4);
    GapStructure gs(s);
    GapId a = gs.create_initial(9);
    GapId b = gs.split(a, {10, 0}, 4, 5);
    GapId c = gs.split(b, {20, 0}, 1, 4);
    EXPECT_EQ(gs.gap_count(), 3u);
    auto res = gs.decrement(b);
    EXPECT_TRUE(res.removed);
    EXPECT_EQ(res.absorber, c);
    EXPECT_EQ(gs.gap_count(), 2u);
    EXPECT_EQ(gs.low_of(c), (Element{10, 0}));
    EXPECT_TRUE(gs.deep_check().ok);
    // last gap is absorbed by its predecessor
    for (int i = 0; i < 3; ++i) gs.decrement(c);
    res = gs.decrement(c);
    EXPECT_TRUE(res.removed);
    EXPECT_EQ(res.absorber, a);
    EXPECT_FALSE(res.absorbed_by_successor);
    EXPECT_EQ(gs.snapshot().back().high, kTop);
    EXPECT_THROW(gs.increment(c), NotFoundError);
    auto rep = gs.deep_check();
    EXPECT_TRUE(rep.ok) << (rep.ok ? "" : rep.problems.front());
}

TEST(GapStructure, DecrementPlain) {
    BlockStore s(4);
    GapStructure gs(s);
    GapId a = gs.create_initial(5);
    EXPECT_FALSE(gs.decrement(a).removed);
    EXPECT_EQ(gs.weight_of(a), 4u);
}

TEST(GapStructure, NewBucketOnOverflow) {
    BlockStore s(4);
    GapStructure gs(s);
    GapId a = gs.create_initial(1000);
    for (std::uint64_t k = 1; k <= 3; ++k) gs.split(a, {40 - k * 10, 0}, gs.weight_of(a) - 1, 1);
    EXPECT_EQ(gs.bucket_count(), 1u);
    EXPECT_EQ(gs.bucket_size(0), 4u);
    gs.split(a, {5, 0}, gs.weight_of(a) - 1, 1);
    EXPECT_EQ(gs.bucket_count(), 2u);
    EXPECT_EQ(gs.bucket_size(1), 1u);
    EXPECT_TRUE(gs.deep_check().ok);
}

TEST(GapStructure, CorruptHoleIsReported) {
    BlockStore s(4);
    GapStructure gs(s);
    GapId a = gs.create_initial(1000);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 30; ++i) gs.split(a, {static_cast<Key>(1000 - i * 10), 0}, gs.weight_of(a) - 5, 5);
    ASSERT_TRUE(gs.deep_check().ok);
    gs.debug_corrupt_hole(a, 1);
    auto rep = gs.deep_check();
    ASSERT_FALSE(rep.ok);
    EXPECT_NE(rep.problems.front().find("hole"), std::string::npos);
}

class GapStress : public ::testing::TestWithParam<std::size_t> {};

TEST_P(GapStress, RandomOpsMatchReference) {
    const std::size_t B = GetParam();
    BlockStore s(B);
    GapStructure gs(s);
    Reference ref;
    std::mt19937_64 rng(B * 77);
    GapId first = gs.create_initial(400);
    ref.gaps.push_back({first, kBottom, kTop, 400});
    const Key span = Key{1} << 40;
    for (int step = 0; step < 1500; ++step) {
        const int op = static_cast<int>(rng() % 10);
        std::size_t i = rng() % ref.gaps.size();
        RefGap g = ref.gaps[i];
        if (op < 5 && g.w >= 2) {
            const Key lo = g.low.key;
            const Key hi = g.high == kTop ? span : g.high.key;
            if (hi - lo < 2) continue;
            Element cut{lo + 1 + rng() % (hi - lo - 1), 0};
            std::uint64_t xl = 1 + rng() % (g.w - 1);
            GapId n = gs.split(g.id, cut, xl, g.w - xl);
            ref.gaps[i].high = cut;
            ref.gaps[i].w = xl;
            ref.gaps.insert(ref.gaps.begin() + static_cast<std::ptrdiff_t>(i + 1), RefGap{n, cut, g.high, g.w - xl});
        } else if (op < 7) {
            gs.increment(g.id);
            ++ref.gaps[i].w;
        } else {
            auto res = gs.decrement(g.id);
            if (--ref.gaps[i].w == 0) {
                ASSERT_TRUE(res.removed);
                if (ref.gaps.size() == 1) {
                    ref.gaps.clear();
                    first = gs.create_initial(50);
                    ref.gaps.push_back({first, kBottom, kTop, 50});
                } else if (i + 1 < ref.gaps.size()) {
                    ASSERT_EQ(res.absorber, ref.gaps[i + 1].id);
                    ref.gaps[i + 1].low = g.low;
                    ref.gaps.erase(ref.gaps.begin() + static_cast<std::ptrdiff_t>(i));
                } else {
                    ASSERT_EQ(res.absorber, ref.gaps[i - 1].id);
                    ref.gaps[i - 1].high = g.high;
                    ref.gaps.erase(ref.gaps.begin() + static_cast<std::ptrdiff_t>(i));
                }
            } else {
                ASSERT_FALSE(res.removed);
            }
        }
        ASSERT_EQ(gs.total_weight(), ref.total());
        if (step % 25 == 0 || step > 1450) {
            expect_same(gs, ref);
            expect_rebucketing_matches(gs);
        }
        for (int probe = 0; probe < 3; ++probe) {
            Element e{rng() % span, rng() % 4};
            auto loc = gs.by_element(e);
            std::size_t k = ref.containing(e);
            ASSERT_EQ(loc.id, ref.gaps[k].id);
            ASSERT_EQ(loc.rank, ref.rank_of(k));
            std::uint64_t r = 1 + rng() % ref.total();
            auto byr = gs.by_rank(r);
            ASSERT_LT(byr.rank, r);
            ASSERT_LE(r, byr.rank + byr.weight);
            ASSERT_EQ(byr.rank, ref.rank_of(ref.index_of(byr.id)));
        }
    }
}

TEST_P(GapStress, BucketsVisitedBound) {
    const std::size_t B = GetParam();
    BlockStore s(B);
    GapStructure gs(s);
    std::mt19937_64 rng(B);
    GapId a = gs.create_initial(1u << 20);
    for (int i = 0; i < 600; ++i) {
        auto snap = gs.snapshot();
        auto& g = snap[rng() % snap.size()];
        if (g.weight < 2) continue;
        const Key lo = g.low.key;
        const Key hi = g.high == kTop ? (Key{1} << 40) : g.high.key;
        if (hi - lo < 2) continue;
        std::uint64_t xl = 1 + rng() % (g.weight - 1);
        gs.split(g.id, {lo + 1 + rng() % (hi - lo - 1), 0}, xl, g.weight - xl);
    }
    (void)a;
    const double W = static_cast<double>(gs.total_weight());
    for (auto& g : gs.snapshot()) {
        auto loc = gs.by_element(g.low);
        const double lb = std::log(W / static_cast<double>(g.weight)) / std::log(static_cast<double>(std::max<std::size_t>(B, 4)));
        const double bound = 2 + std::log2(std::max(1.0, lb));
        EXPECT_LE(static_cast<double>(loc.buckets_visited), bound) << "w=" << g.weight;
        // bijectivity over the gap's rank span
        EXPECT_EQ(gs.by_rank(loc.rank + 1).id, g.id);
        EXPECT_EQ(gs.by_rank(loc.rank + g.weight).id, g.id);
    }
}

INSTANTIATE_TEST_SUITE_P(BlockSizes, GapStress, ::testing::Values(4, 5, 16));
