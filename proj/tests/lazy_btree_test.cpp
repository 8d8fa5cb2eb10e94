#include "lazybtree/lazy_btree.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

using namespace lazybtree;

namespace {

void expect_clean(const LazyBTree& t) {
    const CheckReport rep = t.deep_check();
    ASSERT_TRUE(rep.ok) << (rep.problems.empty() ? "" : rep.problems.front());
}

std::vector<std::uint64_t> weights(const LazyBTree& t) {
    std::vector<std::uint64_t> w;
    for (const auto& g : t.gaps()) w.push_back(g.weight);
    return w;
}

// sorted (key, id) multiset with rank lookups by linear scan
struct Ref {
    std::set<Element> s;
    std::pair<std::uint64_t, Element> pred(Key k) const {
        auto it = s.upper_bound(key_probe(k));
        if (it == s.begin()) return {0, kBottom};
        --it;
        return {static_cast<std::uint64_t>(std::distance(s.begin(), it)) + 1, *it};
    }
    Element at(std::uint64_t r) const { return *std::next(s.begin(), static_cast<std::ptrdiff_t>(r - 1)); }
};

} // namespace

TEST(LazyBTree, QueryElementSplitsAtPredecessor) {
    const std::vector<Key> keys{10, 20, 30};
    LazyBTree t({.block_size = 4}, keys);
    const QueryResult r = t.query_element(25);
    EXPECT_EQ(r.key, 20u);
    EXPECT_EQ(r.rank, 2u);
    EXPECT_EQ(weights(t), (std::vector<std::uint64_t>{2, 1}));
    expect_clean(t);
}

TEST(LazyBTree, QueryRankSplitsAfterRank) {
    std::vector<Key> keys(100);
    std::iota(keys.begin(), keys.end(), 1);
    std::shuffle(keys.begin(), keys.end(), std::mt19937_64(3));
    LazyBTree t({.block_size = 8}, keys);
    const QueryResult r = t.query_rank(30);
    EXPECT_EQ(r.key, 30u);
    EXPECT_EQ(weights(t), (std::vector<std::uint64_t>{30, 70}));
    EXPECT_EQ(t.stats().queries, 1u);
    EXPECT_EQ(t.stats().gaps, 2u);
    expect_clean(t);
}

TEST(LazyBTree, FreshConstructStats) {
    std::vector<Key> keys(100);
    std::iota(keys.begin(), keys.end(), 0);
    LazyBTree t({.block_size = 10}, keys);
    const LazyStats s = t.stats();
    EXPECT_EQ(s.n, 100u);
    EXPECT_EQ(s.gaps, 1u);
    EXPECT_EQ(s.queries, 0u);
    ASSERT_NE(t.intervals_of(t.gaps()[0].id), nullptr);
    EXPECT_EQ(t.intervals_of(t.gaps()[0].id)->interval_count(), 1u);
    EXPECT_LE(s.tally(OpKind::construct).total(), 4u * 10u);
    EXPECT_EQ(s.io_reads, t.store().counters().reads);
    EXPECT_EQ(s.io_writes, t.store().counters().writes);
}

TEST(LazyBTree, SingleElementConstruct) {
    const std::vector<Key> keys{5};
    LazyBTree t({.block_size = 4}, keys);
    EXPECT_EQ(t.gap_count(), 1u);
    EXPECT_EQ(t.size(), 1u);
    expect_clean(t);
}

TEST(LazyBTree, ExtractionEqualsSorted) {
    std::mt19937_64 rng(5);
    std::vector<Key> keys(500);
    for (auto& k : keys) k = rng() % 100;
    LazyBTree t({.block_size = 8}, keys);
    auto sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Key> got;
    for (const auto& e : t.elements()) got.push_back(e.key);
    EXPECT_EQ(got, sorted);
}

TEST(LazyBTree, QueryMaxIsBoundary) {
    const std::vector<Key> keys{3, 1, 2, 9, 7};
    LazyBTree t({.block_size = 4}, keys);
    const QueryResult r = t.query_element(1000);
    EXPECT_EQ(r.key, 9u);
    EXPECT_EQ(r.rank, 5u);
    EXPECT_EQ(t.gap_count(), 1u);
}

TEST(LazyBTree, RepeatedQueryIsCheaper) {
    std::vector<Key> keys(5000);
    std::mt19937_64 rng(11);
    for (auto& k : keys) k = rng() % 1000000;
    LazyBTree t({.block_size = 16}, keys);
    t.query_element(500000);
    const auto first = t.last_op().ios.total();
    t.query_element(500000);
    EXPECT_LT(t.last_op().ios.total(), first);
}

TEST(LazyBTree, NoPredecessorLeavesStructureUnchanged) {
    const std::vector<Key> keys{10, 20};
    LazyBTree t({.block_size = 4}, keys);
    EXPECT_THROW(t.query_element(5), NoPredecessorError);
    EXPECT_EQ(t.query_count(), 0u);
    EXPECT_EQ(t.gap_count(), 1u);
    LazyBTree e({.block_size = 4});
    EXPECT_THROW(e.query_element(5), NoPredecessorError);
    EXPECT_THROW(t.query_rank(0), RankError);
    EXPECT_THROW(t.query_rank(3), RankError);
}

TEST(LazyBTree, AllRanksGiveSingletons) {
    std::vector<Key> keys(300);
    std::iota(keys.begin(), keys.end(), 0);
    std::mt19937_64 rng(2);
    std::shuffle(keys.begin(), keys.end(), rng);
    LazyBTree t({.block_size = 4}, keys);
    std::vector<std::uint64_t> ranks(300);
    std::iota(ranks.begin(), ranks.end(), 1);
    std::shuffle(ranks.begin(), ranks.end(), rng);
    for (auto r : ranks) ASSERT_EQ(t.query_rank(r).key, r - 1);
    EXPECT_EQ(t.gap_count(), 300u);
    for (const auto& g : t.gaps()) EXPECT_EQ(g.weight, 1u);
    std::vector<Key> got;
    for (const auto& e : t.elements()) got.push_back(e.key);
    std::sort(keys.begin(), keys.end());
    EXPECT_EQ(got, keys);
    expect_clean(t);
}

TEST(LazyBTree, DeleteAllLeaksNothing) {
    for (std::size_t b : {4, 16}) {
        std::vector<Key> keys(400);
        std::mt19937_64 rng(b);
        for (auto& k : keys) k = rng() % 1000;
        LazyBTree t({.block_size = b}, keys);
        for (int i = 0; i < 40; ++i) t.query_rank(1 + rng() % t.size());
        std::vector<ElementHandle> hs(keys.size());
        std::iota(hs.begin(), hs.end(), 0);
        std::shuffle(hs.begin(), hs.end(), rng);
        for (std::size_t i = 0; i < hs.size(); ++i) {
            t.erase(hs[i]);
            if (i % 37 == 0) expect_clean(t);
        }
        EXPECT_TRUE(t.empty());
        EXPECT_EQ(t.gap_count(), 0u);
        EXPECT_EQ(t.store().allocated_blocks(), 0u);
        EXPECT_THROW(t.erase(hs[0]), NotFoundError);
    }
}

TEST(LazyBTree, SingletonGapDelete) {
    const std::vector<Key> keys{1, 2, 3, 4, 5, 6};
    LazyBTree t({.block_size = 4}, keys);
    const QueryResult r = t.query_rank(1);
    EXPECT_EQ(t.gap_count(), 2u);
    t.erase(r.handle);
    EXPECT_EQ(t.gap_count(), 1u);
    EXPECT_EQ(t.gaps()[0].low, kBottom);
    EXPECT_EQ(t.gaps()[0].high, kTop);
    expect_clean(t);
}

TEST(LazyBTree, ChangeKeyTowardAndDegrade) {
    std::vector<Key> keys(200);
    std::iota(keys.begin(), keys.end(), 0);
    LazyBTree t({.block_size = 4}, keys);
    t.query_rank(100); // gaps [0,99] one_right, [100,199] one_left
    t.change_key(150, 120);
    EXPECT_TRUE(t.last_op().toward);
    EXPECT_FALSE(t.last_op().degraded);
    t.change_key(150, 180);
    EXPECT_FALSE(t.last_op().toward);
    t.change_key(150, 10);
    EXPECT_TRUE(t.last_op().degraded);
    EXPECT_EQ(t.key_of(150), 10u);
    EXPECT_EQ(t.query_element(10).rank, 12u);
    expect_clean(t);
}

TEST(LazyBTree, InsertIntoEmptyCreatesGap) {
    LazyBTree t({.block_size = 4});
    const auto h = t.insert(42);
    EXPECT_EQ(t.gap_count(), 1u);
    EXPECT_EQ(t.key_of(h), 42u);
    t.insert(7);
    EXPECT_EQ(t.query_rank(1).key, 7u);
    expect_clean(t);
}

TEST(LazyBTree, LightGapsMoveBetweenRepresentations) {
    LazyBTree t({.block_size = 8});
    for (Key k = 0; k < 3; ++k) t.insert(k);
    EXPECT_TRUE(t.gaps()[0].light);
    for (Key k = 3; k < 16; ++k) t.insert(k);
    EXPECT_TRUE(t.gaps()[0].light);
    t.insert(16);
    EXPECT_FALSE(t.gaps()[0].light);
    expect_clean(t);
    for (ElementHandle h = 0; h < 14; ++h) t.erase(h);
    EXPECT_TRUE(t.gaps()[0].light);
    expect_clean(t);
}

class LazyStress : public ::testing::TestWithParam<std::size_t> {};

TEST_P(LazyStress, MixedOpsMatchReference) {
    const std::size_t b = GetParam();
    std::mt19937_64 rng(1000 + b);
    LazyBTree t({.block_size = b});
    Ref ref;
    std::vector<ElementHandle> live;
    std::map<ElementHandle, Key> keys;
    const Key range = 5000;
    for (int op = 0; op < 6000; ++op) {
        const auto dice = rng() % 100;
        if (dice < 40 || live.empty()) {
            const Key k = rng() % range;
            const auto h = t.insert(k);
            ref.s.insert({k, h});
            live.push_back(h);
            keys[h] = k;
        } else if (dice < 55) {
            const std::size_t i = rng() % live.size();
            const auto h = live[i];
            t.erase(h);
            ref.s.erase({keys[h], h});
            keys.erase(h);
            live[i] = live.back();
            live.pop_back();
        } else if (dice < 70) {
            const auto h = live[rng() % live.size()];
            const Key k = rng() % range;
            t.change_key(h, k);
            ref.s.erase({keys[h], h});
            ref.s.insert({k, h});
            keys[h] = k;
        } else if (dice < 85) {
            const Key k = rng() % range;
            const auto [rank, e] = ref.pred(k);
            if (rank == 0) {
                ASSERT_THROW(t.query_element(k), NoPredecessorError);
            } else {
                const QueryResult r = t.query_element(k);
                ASSERT_EQ(r.rank, rank) << "op " << op;
                ASSERT_EQ(r.key, e.key) << "op " << op;
                ASSERT_EQ(r.handle, e.id) << "op " << op;
            }
        } else {
            const std::uint64_t r = 1 + rng() % ref.s.size();
            const QueryResult got = t.query_rank(r);
            const Element want = ref.at(r);
            ASSERT_EQ(got.key, want.key) << "op " << op;
            ASSERT_EQ(got.handle, want.id) << "op " << op;
        }
        if (op % 97 == 0) expect_clean(t);
        ASSERT_EQ(t.size(), ref.s.size());
    }
    expect_clean(t);
    const auto all = t.elements();
    EXPECT_TRUE(std::equal(all.begin(), all.end(), ref.s.begin(), ref.s.end()));
}

INSTANTIATE_TEST_SUITE_P(Blocks, LazyStress, ::testing::Values(2, 4, 5, 16, 64));
