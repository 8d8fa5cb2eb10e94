#pragma once

#include "lazybtree/lazy_btree.hpp"

#include <optional>
#include <span>
#include <utility>

namespace lazybtree {

/**
 * Priority queue on top of a lazy B-tree.
 *
 * minimum() is a rank-1 query; the resulting singleton gap is remembered
 * until the element is deleted or a smaller one shows up. With minimum
 * always followed by its deletion the tree never holds more than two gaps.
 */
class LazyPQ {
public:
    explicit LazyPQ(const LazyConfig& cfg = {}) : tree_(cfg) {}
    LazyPQ(const LazyConfig& cfg, std::span<const Key> keys) : tree_(cfg, keys) {}

    std::uint64_t size() const { return tree_.size(); }
    bool empty() const { return tree_.empty(); }
    std::size_t gap_count() const { return tree_.gap_count(); }
    const LazyBTree& tree() const { return tree_; }
    LazyBTree& tree() { return tree_; }

    ElementHandle insert(Key key) {
        const ElementHandle h = tree_.insert(key);
        if (min_ && Element{key, h} < Element{min_->key, min_->handle}) min_.reset();
        return h;
    }

    std::pair<Key, ElementHandle> minimum() {
        if (empty()) throw EmptyError("minimum of an empty queue");
        if (!min_) min_ = tree_.query_rank(1);
        return {min_->key, min_->handle};
    }

    Key delete_min() {
        const auto [key, h] = minimum();
        tree_.erase(h);
        min_.reset();
        return key;
    }

    void decrease_key(ElementHandle h, Key key) {
        const Key cur = tree_.key_of(h);
        if (key > cur) throw ContractError("decrease_key to a larger key");
        if (key == cur) return;
        tree_.change_key(h, key);
        if (!min_) return;
        if (min_->handle == h)
            min_->key = key;
        else if (Element{key, h} < Element{min_->key, min_->handle})
            min_.reset();
    }

private:
    LazyBTree tree_;
    std::optional<QueryResult> min_;
};

} // namespace lazybtree
