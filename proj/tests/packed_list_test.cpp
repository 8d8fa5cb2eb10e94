#include "lazybtree/packed_list.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace lazybtree;

namespace {

std::vector<Element> sorted(std::vector<Element> v) {
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<Element> make(std::size_t n, ElemId first = 0) {
    std::vector<Element> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back({i * 3 + 1, first + i});
    return v;
}

} // namespace

TEST(PackedList, AppendOne) {
    BlockStore s(4);
    PackedList l(s, nullptr);
    l.append({5, 0});
    EXPECT_EQ(l.size(), 1u);
    EXPECT_EQ(l.block_count(), 1u);
}

TEST(PackedList, AppendOverflowsToSecondBlock) {
    BlockStore s(4);
    PackedList l(s, nullptr);
    for (auto& e : make(5)) l.append(e);
    EXPECT_EQ(l.size(), 5u);
    EXPECT_EQ(l.block_count(), 2u);
    EXPECT_EQ(sorted(l.read_all()), make(5));
}

TEST(PackedList, ConcatCounts) {
    BlockStore s(4);
    PackedList a(s, nullptr), b(s, nullptr);
    for (auto& e : make(3)) a.append(e);
    for (auto& e : make(5, 100)) b.append(e);
    a.concat(std::move(b));
    EXPECT_EQ(a.size(), 8u);
    EXPECT_TRUE(b.empty());
    EXPECT_TRUE(a.check());
}

TEST(PackedList, ConcatWithEmpty) {
    BlockStore s(4);
    PackedList a(s, nullptr), b(s, nullptr);
    for (auto& e : make(3)) a.append(e);
    a.concat(std::move(b));
    EXPECT_EQ(sorted(a.read_all()), make(3));
    PackedList c(s, nullptr);
    c.concat(std::move(a));
    EXPECT_EQ(sorted(c.read_all()), make(3));
}

TEST(PackedList, ConcatMergesHalfFullBlocks) {
    BlockStore s(4);
    PackedList a(s, nullptr), b(s, nullptr);
    for (auto& e : make(2)) a.append(e);
    for (auto& e : make(2, 10)) b.append(e);
    a.concat(std::move(b));
    EXPECT_EQ(a.block_count(), 1u);
    EXPECT_EQ(a.size(), 4u);
}

TEST(PackedList, SplitAt) {
    BlockStore s(4);
    PackedList a(s, nullptr);
    for (auto& e : make(8)) a.append(e);
    PackedList b = a.split_at(3);
    EXPECT_EQ(a.size(), 3u);
    EXPECT_EQ(b.size(), 5u);
    auto all = a.read_all();
    auto rest = b.read_all();
    all.insert(all.end(), rest.begin(), rest.end());
    EXPECT_EQ(sorted(all), make(8));
    EXPECT_TRUE(a.check());
    EXPECT_TRUE(b.check());
}

TEST(PackedList, SplitAtEnds) {
    BlockStore s(4);
    PackedList a(s, nullptr);
    for (auto& e : make(8)) a.append(e);
    PackedList none = a.split_at(8);
    EXPECT_EQ(none.size(), 0u);
    EXPECT_EQ(a.size(), 8u);
    PackedList all = a.split_at(0);
    EXPECT_EQ(a.size(), 0u);
    EXPECT_EQ(all.size(), 8u);
    EXPECT_THROW(all.split_at(9), RankError);
}

TEST(PackedList, ScanChargesOneReadPerBlock) {
    BlockStore s(8);
    PackedList l(s, nullptr);
    for (auto& e : make(64)) l.append(e);
    s.reset_counters();
    std::size_t n = 0;
    l.scan([&](const Element&) { ++n; });
    EXPECT_EQ(n, 64u);
    EXPECT_EQ(s.counters().reads, l.block_count());
    EXPECT_LE(l.block_count(), 16u);
}

TEST(PackedList, EmptyScanIsFree) {
    BlockStore s(8);
    PackedList l(s, nullptr);
    bool called = false;
    l.scan([&](const Element&) { called = true; });
    EXPECT_FALSE(called);
    EXPECT_EQ(s.counters().total(), 0u);
}

TEST(PackedList, EraseViaRegistryKeepsFillRule) {
    BlockStore s(8);
    HandleRegistry reg;
    PackedList l(s, &reg);
    auto elems = make(200);
    l.append_bulk(elems);
    std::mt19937_64 rng(3);
    std::shuffle(elems.begin(), elems.end(), rng);
    for (std::size_t i = 0; i < elems.size(); ++i) {
        ListBlock* b = reg.find(elems[i].id);
        ASSERT_NE(b, nullptr);
        l.erase(b, elems[i].id);
        std::string why;
        ASSERT_TRUE(l.check(&why)) << why;
        ASSERT_LE(l.block_count(), 4 * l.size() / 8 + 2);
        ASSERT_EQ(reg.live(), l.size());
    }
    EXPECT_EQ(s.allocated_blocks(), 0u);
}

TEST(PackedList, RandomSpliceStressPreservesMultiset) {
    BlockStore s(4);
    HandleRegistry reg;
    std::mt19937_64 rng(11);
    std::vector<PackedList> lists;
    lists.emplace_back(s, &reg);
    auto elems = make(500);
    for (auto& e : elems) lists[0].append(e);
    for (int step = 0; step < 400; ++step) {
        std::size_t i = rng() % lists.size();
        if (rng() % 2 && lists[i].size() > 1) {
            lists.push_back(lists[i].split_at(rng() % lists[i].size()));
        } else if (lists.size() > 1) {
            std::size_t j = rng() % lists.size();
            if (j == i) continue;
            lists[i].concat(std::move(lists[j]));
            lists.erase(lists.begin() + static_cast<std::ptrdiff_t>(j));
        }
        for (auto& l : lists) {
            std::string why;
            ASSERT_TRUE(l.check(&why)) << why;
            ASSERT_LE(l.block_count(), 4 * l.size() / 4 + 2);
        }
    }
    std::vector<Element> all;
    for (auto& l : lists) {
        auto v = l.read_all();
        all.insert(all.end(), v.begin(), v.end());
    }
    EXPECT_EQ(sorted(all), elems);
    reg.for_each([&](ElemId id, ListBlock* b) {
        EXPECT_TRUE(std::any_of(b->elems.begin(), b->elems.end(), [&](const Element& e) { return e.id == id; }));
    });
}
