#include "lazybtree/block_store.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace lazybtree;

TEST(BlockStore, FirstAllocation) {
    BlockStore s(8);
    BlockId a = s.alloc_block();
    EXPECT_EQ(a.value, 0u);
    EXPECT_EQ(s.allocated_blocks(), 1u);
    EXPECT_EQ(s.counters().writes, 1u);
}

TEST(BlockStore, IdsAreFreshAndNeverReused) {
    BlockStore s(8);
    std::set<std::uint64_t> ids;
    for (int i = 0; i < 3; ++i) ids.insert(s.alloc_block().value);
    EXPECT_EQ(ids.size(), 3u);
    s.free_block(BlockId{0});
    BlockId d = s.alloc_block();
    EXPECT_FALSE(ids.contains(d.value));
}

TEST(BlockStore, RejectsTinyBlocks) {
    EXPECT_THROW(BlockStore(1), ContractError);
    EXPECT_NO_THROW(BlockStore(2));
}

TEST(BlockStore, UncachedCountsEveryAccess) {
    BlockStore s(4);
    BlockId a = s.alloc_block();
    s.reset_counters();
    for (int i = 0; i < 5; ++i) s.access(a, Access::read);
    s.access(a, Access::write);
    EXPECT_EQ(s.counters().reads, 5u);
    EXPECT_EQ(s.counters().writes, 1u);
}

TEST(BlockStore, CacheHit) {
    BlockStore s(4, 1);
    BlockId a = s.alloc_block();
    BlockId b = s.alloc_block();
    s.reset_counters();
    s.access(a, Access::read);
    s.access(a, Access::read);
    EXPECT_EQ(s.counters().reads, 1u);
    (void)b;
}

TEST(BlockStore, LruByHand) {
    BlockStore s(4, 1);
    BlockId a = s.alloc_block();
    BlockId b = s.alloc_block();
    BlockId c = s.alloc_block(); // leaves only c cached
    s.reset_counters();
    s.access(a, Access::read);
    s.access(b, Access::read);
    s.access(a, Access::read);
    EXPECT_EQ(s.counters().reads, 3u);
    EXPECT_LE(s.cache_occupancy(), 1u);
    (void)c;
}

TEST(BlockStore, DirtyEvictionCostsAWrite) {
    BlockStore s(4, 1);
    BlockId a = s.alloc_block();
    BlockId b = s.alloc_block();
    s.reset_counters();
    s.access(a, Access::write); // miss, dirty
    s.access(b, Access::read);  // evicts dirty a
    EXPECT_EQ(s.counters().reads, 2u);
    EXPECT_EQ(s.counters().writes, 1u);
}

TEST(BlockStore, FreedAccessIsCorruption) {
    BlockStore s(4);
    BlockId a = s.alloc_block();
    s.free_block(a);
    EXPECT_THROW(s.access(a, Access::read), CorruptionError);
    EXPECT_THROW(s.free_block(a), CorruptionError);
}

TEST(BlockStore, DeterministicCounters) {
    auto run = [] {
        BlockStore s(4, 3);
        std::vector<BlockId> ids;
        for (int i = 0; i < 10; ++i) ids.push_back(s.alloc_block());
        for (int i = 0; i < 200; ++i) s.access(ids[(i * 7) % 10], i % 3 ? Access::read : Access::write);
        return std::pair{s.counters().reads, s.counters().writes};
    };
    EXPECT_EQ(run(), run());
}

TEST(BlockStore, StreamCharge) {
    BlockStore s(8);
    s.charge_stream(17, Access::read);
    s.charge_stream(0, Access::write);
    EXPECT_EQ(s.counters().reads, 3u);
    EXPECT_EQ(s.counters().writes, 0u);
}

TEST(BlockStore, LayerAttribution) {
    BlockStore s(4);
    const BlockId a = s.alloc_block();
    {
        const LayerScope outer(s, Layer::gap);
        s.access(a, Access::read);
        {
            const LayerScope inner(s, Layer::element);
            s.charge_stream(9, Access::write);
        }
        s.access(a, Access::write);
    }
    s.access(a, Access::read);
    EXPECT_EQ(s.counters(Layer::gap).reads, 1u);
    EXPECT_EQ(s.counters(Layer::gap).writes, 1u);
    EXPECT_EQ(s.counters(Layer::element).reads, 1u);
    EXPECT_EQ(s.counters(Layer::element).writes, 4u);
    EXPECT_EQ(s.counters().total(), s.counters(Layer::gap).total() + s.counters(Layer::element).total());
}
