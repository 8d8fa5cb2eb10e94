#pragma once

#include "lazybtree/element.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <list>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace lazybtree {

/// Opaque identifier of an allocated block. Ids are never reused.
struct BlockId {
    std::uint64_t value = kInvalid;

    static constexpr std::uint64_t kInvalid = ~std::uint64_t{0};

    constexpr bool valid() const { return value != kInvalid; }
    friend constexpr bool operator==(BlockId, BlockId) = default;
};

enum class Access : std::uint8_t { read, write };

/// Which part of a structure an I/O is attributed to.
enum class Layer : std::uint8_t { element, gap };

struct IoCounters {
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;

    std::uint64_t total() const { return reads + writes; }

    friend IoCounters operator-(const IoCounters& a, const IoCounters& b) {
        return {a.reads - b.reads, a.writes - b.writes};
    }
};

/**
 * Simulated external memory.
 *
 * The store does not hold payloads; structures keep their block contents in
 * ordinary objects tagged with a BlockId and report every touch through
 * access(). The store is the only place I/Os are counted.
 *
 * With cache_capacity == 0 every read access is one read I/O and every write
 * access is one write I/O. Otherwise an LRU cache of whole blocks is
 * simulated with write-back: a miss costs one read, evicting a dirty block
 * costs one write.
 */
class BlockStore {
public:
    explicit BlockStore(std::size_t block_size, std::size_t cache_capacity = 0)
        : block_size_(block_size), cache_capacity_(cache_capacity) {
        if (block_size < 2)
            throw ContractError("block size must be at least 2");
    }

    BlockStore(const BlockStore&) = delete;
    BlockStore& operator=(const BlockStore&) = delete;
    BlockStore(BlockStore&&) = default;
    BlockStore& operator=(BlockStore&&) = default;

    std::size_t block_size() const { return block_size_; }
    std::size_t cache_capacity() const { return cache_capacity_; }

    /// Materializes a fresh block; counts one write.
    BlockId alloc_block() {
        BlockId id{next_id_++};
        live_.insert(id.value);
        count(Access::write);
        if (cache_capacity_ > 0) admit(id.value, false);
        return id;
    }

    void free_block(BlockId id) {
        if (live_.erase(id.value) == 0)
            throw CorruptionError("free of unknown block " + std::to_string(id.value));
        if (auto it = cache_index_.find(id.value); it != cache_index_.end()) {
            lru_.erase(it->second);
            cache_index_.erase(it);
        }
    }

    void access(BlockId id, Access mode) {
        if (!live_.contains(id.value))
            throw CorruptionError("access to freed or unknown block " +
                                  std::to_string(id.value));
        if (cache_capacity_ == 0) {
            count(mode);
            return;
        }
        if (auto it = cache_index_.find(id.value); it != cache_index_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second);
            if (mode == Access::write) it->second->dirty = true;
            return;
        }
        count(Access::read);
        admit(id.value, mode == Access::write);
    }

    /// Charges a sequential stream of n elements of scratch data (temporary
    /// runs written or read by scan-based algorithms). Bypasses the cache.
    void charge_stream(std::size_t n, Access mode) {
        count(mode, (n + block_size_ - 1) / block_size_);
    }

    const IoCounters& counters() const { return counters_; }
    const IoCounters& counters(Layer l) const { return by_layer_[static_cast<std::size_t>(l)]; }
    void reset_counters() {
        counters_ = {};
        by_layer_ = {};
    }

    Layer layer() const { return layer_; }
    void set_layer(Layer l) { layer_ = l; }

    std::size_t allocated_blocks() const { return live_.size(); }
    std::size_t cache_occupancy() const { return lru_.size(); }
    bool is_live(BlockId id) const { return live_.contains(id.value); }
    bool is_cached(BlockId id) const { return cache_index_.contains(id.value); }

    /// Writes back all dirty cached blocks.
    void flush() {
        for (auto& e : lru_) {
            if (e.dirty) {
                count(Access::write);
                e.dirty = false;
            }
        }
    }

private:
    struct CacheEntry {
        std::uint64_t id;
        bool dirty;
    };

    void admit(std::uint64_t id, bool dirty) {
        if (lru_.size() >= cache_capacity_) {
            const CacheEntry& victim = lru_.back();
            if (victim.dirty) count(Access::write);
            cache_index_.erase(victim.id);
            lru_.pop_back();
        }
        lru_.push_front({id, dirty});
        cache_index_[id] = lru_.begin();
    }

    void count(Access mode, std::uint64_t n = 1) {
        IoCounters& l = by_layer_[static_cast<std::size_t>(layer_)];
        if (mode == Access::read) {
            counters_.reads += n;
            l.reads += n;
        } else {
            counters_.writes += n;
            l.writes += n;
        }
    }

    std::size_t block_size_;
    std::size_t cache_capacity_;
    std::uint64_t next_id_ = 0;
    IoCounters counters_;
    std::array<IoCounters, 2> by_layer_{};
    Layer layer_ = Layer::element;
    std::unordered_set<std::uint64_t> live_;
    std::list<CacheEntry> lru_;
    std::unordered_map<std::uint64_t, std::list<CacheEntry>::iterator> cache_index_;
};

/// Attributes the I/Os of a scope to one layer.
class LayerScope {
public:
    LayerScope(BlockStore& s, Layer l) : store_(&s), prev_(s.layer()) { s.set_layer(l); }
    ~LayerScope() { store_->set_layer(prev_); }
    LayerScope(const LayerScope&) = delete;
    LayerScope& operator=(const LayerScope&) = delete;

private:
    BlockStore* store_;
    Layer prev_;
};

} // namespace lazybtree
