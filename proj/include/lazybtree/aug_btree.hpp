#pragma once

#include "lazybtree/block_store.hpp"
#include "lazybtree/element.hpp"

#include <algorithm>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lazybtree {

/**
 * B+-tree over an ordered sequence of items with a per-child summary stored
 * in every internal node. Each node is one block of the BlockStore; the
 * tree charges one read per node visited and one write per node modified.
 *
 * The tree does not know the item order. Callers position themselves with
 * descend(), handing in pickers that inspect child summaries (internal
 * nodes) or items (leaves), then insert/erase/update at the resulting path.
 *
 * Traits must provide:
 *   using Item, using Summary;
 *   static Summary of(const Item&);
 *   static Summary combine(const Summary&, const Summary&);
 *   static Summary identity();
 *
 * Non-root nodes hold between max(2, ceil(fanout/4)) and fanout entries.
 */
template <class Traits>
class AugBTree {
public:
    using Item = typename Traits::Item;
    using Summary = typename Traits::Summary;

    struct Node {
        BlockId id;
        bool leaf = true;
        std::vector<Item> items;
        std::vector<std::unique_ptr<Node>> kids;
        std::vector<Summary> sums;

        std::size_t entries() const { return leaf ? items.size() : kids.size(); }
    };

    /// Root-to-leaf position. idx.back() is a slot in the leaf, possibly
    /// one past its last item (an insertion point).
    struct Path {
        std::vector<Node*> nodes;
        std::vector<std::size_t> idx;

        bool empty() const { return nodes.empty(); }
        Node* leaf() const { return nodes.back(); }
        std::size_t slot() const { return idx.back(); }
        bool at_item() const { return !nodes.empty() && idx.back() < nodes.back()->items.size(); }
        Item& item() const { return nodes.back()->items[idx.back()]; }
    };

    AugBTree(BlockStore& store, std::size_t fanout) : store_(&store), fanout_(fanout) {
        if (fanout_ < 4) throw ContractError("fanout must be at least 4");
    }

    AugBTree(const AugBTree&) = delete;
    AugBTree& operator=(const AugBTree&) = delete;
    AugBTree(AugBTree&& o) noexcept
        : store_(o.store_), fanout_(o.fanout_), root_(std::move(o.root_)), size_(o.size_), nodes_(o.nodes_) {
        o.size_ = 0;
        o.nodes_ = 0;
    }
    AugBTree& operator=(AugBTree&& o) noexcept {
        if (this != &o) {
            clear();
            store_ = o.store_;
            fanout_ = o.fanout_;
            root_ = std::move(o.root_);
            size_ = o.size_;
            nodes_ = o.nodes_;
            o.size_ = 0;
            o.nodes_ = 0;
        }
        return *this;
    }
    ~AugBTree() { clear(); }

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    std::size_t node_count() const { return nodes_; }
    std::size_t fanout() const { return fanout_; }

    std::size_t height() const {
        std::size_t h = 0;
        for (const Node* n = root_.get(); n; n = n->leaf ? nullptr : n->kids.front().get()) ++h;
        return h;
    }

    /// Summary of the whole tree. Root metadata is resident; not charged.
    Summary total() const { return root_ ? summarize(*root_) : Traits::identity(); }

    template <class PickChild, class PickItem>
    Path descend(PickChild&& pick_child, PickItem&& pick_item) const {
        Path p;
        Node* n = root_.get();
        while (n) {
            store_->access(n->id, Access::read);
            p.nodes.push_back(n);
            if (n->leaf) {
                p.idx.push_back(pick_item(std::span<const Item>(n->items)));
                break;
            }
            const std::size_t c = pick_child(std::span<const Summary>(n->sums));
            p.idx.push_back(c);
            n = n->kids[c].get();
        }
        return p;
    }

    Path leftmost() const {
        return descend([](std::span<const Summary>) { return std::size_t{0}; },
                       [](std::span<const Item>) { return std::size_t{0}; });
    }

    Path rightmost() const {
        return descend([](std::span<const Summary> s) { return s.size() - 1; },
                       [](std::span<const Item> s) { return s.empty() ? 0 : s.size() - 1; });
    }

    /// Inserts `item` at the path's leaf slot, splitting upward as needed.
    void insert(const Path& p, Item item) {
        ++size_;
        if (!root_) {
            root_ = make_node(true);
            root_->items.push_back(std::move(item));
            return;
        }
        Node* leaf = p.leaf();
        leaf->items.insert(leaf->items.begin() + static_cast<std::ptrdiff_t>(p.slot()), std::move(item));
        for (std::size_t level = p.nodes.size(); level-- > 0;) {
            Node* n = p.nodes[level];
            std::unique_ptr<Node> right;
            if (n->entries() > fanout_) right = split(*n);
            store_->access(n->id, Access::write);
            if (level == 0) {
                if (right) {
                    auto fresh = make_node(false);
                    fresh->sums.push_back(summarize(*n));
                    fresh->sums.push_back(summarize(*right));
                    fresh->kids.push_back(std::move(root_));
                    fresh->kids.push_back(std::move(right));
                    root_ = std::move(fresh);
                }
                break;
            }
            Node* parent = p.nodes[level - 1];
            const std::size_t ci = p.idx[level - 1];
            parent->sums[ci] = summarize(*n);
            if (right) {
                parent->sums.insert(parent->sums.begin() + static_cast<std::ptrdiff_t>(ci + 1), summarize(*right));
                parent->kids.insert(parent->kids.begin() + static_cast<std::ptrdiff_t>(ci + 1), std::move(right));
            }
        }
    }

    /// Removes the item at the path, merging or borrowing upward.
    Item erase(const Path& p) {
        if (!p.at_item()) throw CorruptionError("erase at a non-item position");
        Node* leaf = p.leaf();
        Item out = std::move(leaf->items[p.slot()]);
        leaf->items.erase(leaf->items.begin() + static_cast<std::ptrdiff_t>(p.slot()));
        --size_;
        const std::size_t lo = min_entries();
        for (std::size_t level = p.nodes.size(); level-- > 0;) {
            Node* n = p.nodes[level];
            if (level == 0) {
                if (!n->leaf && n->kids.size() == 1) {
                    std::unique_ptr<Node> child = std::move(n->kids.front());
                    free_node(*root_);
                    root_ = std::move(child);
                } else if (n->leaf && n->items.empty()) {
                    free_node(*root_);
                    root_.reset();
                } else {
                    store_->access(n->id, Access::write);
                }
                break;
            }
            Node* parent = p.nodes[level - 1];
            const std::size_t ci = p.idx[level - 1];
            if (n->entries() >= lo) {
                store_->access(n->id, Access::write);
                parent->sums[ci] = summarize(*n);
                continue;
            }
            const std::size_t si = ci + 1 < parent->kids.size() ? ci + 1 : ci - 1;
            Node* sib = parent->kids[si].get();
            store_->access(sib->id, Access::read);
            const std::size_t li = std::min(ci, si);
            Node* left = parent->kids[li].get();
            Node* right = parent->kids[li + 1].get();
            if (left->entries() + right->entries() <= fanout_) {
                absorb(*left, *right);
                store_->access(left->id, Access::write);
                free_node(*right);
                parent->kids.erase(parent->kids.begin() + static_cast<std::ptrdiff_t>(li + 1));
                parent->sums.erase(parent->sums.begin() + static_cast<std::ptrdiff_t>(li + 1));
                parent->sums[li] = summarize(*left);
            } else {
                if (n == left)
                    shift_left(*left, *right);
                else
                    shift_right(*left, *right);
                store_->access(left->id, Access::write);
                store_->access(right->id, Access::write);
                parent->sums[li] = summarize(*left);
                parent->sums[li + 1] = summarize(*right);
            }
        }
        return out;
    }

    /// Applies fn to the item at the path and refreshes summaries upward.
    template <class Fn>
    void update(const Path& p, Fn&& fn) {
        if (!p.at_item()) throw CorruptionError("update at a non-item position");
        fn(p.item());
        refresh(p);
    }

    /// Rewrites summaries along the path after an in-place item change.
    void refresh(const Path& p) {
        for (std::size_t level = p.nodes.size(); level-- > 0;) {
            Node* n = p.nodes[level];
            store_->access(n->id, Access::write);
            if (level > 0) p.nodes[level - 1]->sums[p.idx[level - 1]] = summarize(*n);
        }
    }

    /// Replaces the whole tree with the given items (already in order).
    /// One write per node created.
    void build(std::vector<Item> items) {
        clear();
        size_ = items.size();
        if (items.empty()) return;
        std::vector<std::unique_ptr<Node>> level;
        const std::size_t leaves = (items.size() + fanout_ - 1) / fanout_;
        std::size_t pos = 0;
        for (std::size_t i = 0; i < leaves; ++i) {
            const std::size_t take = share(items.size(), leaves, i);
            auto n = make_node(true);
            for (std::size_t j = 0; j < take; ++j) n->items.push_back(std::move(items[pos + j]));
            pos += take;
            level.push_back(std::move(n));
        }
        while (level.size() > 1) {
            std::vector<std::unique_ptr<Node>> up;
            const std::size_t groups = (level.size() + fanout_ - 1) / fanout_;
            std::size_t k = 0;
            for (std::size_t i = 0; i < groups; ++i) {
                const std::size_t take = share(level.size(), groups, i);
                auto n = make_node(false);
                for (std::size_t j = 0; j < take; ++j) {
                    n->sums.push_back(summarize(*level[k + j]));
                    n->kids.push_back(std::move(level[k + j]));
                }
                k += take;
                up.push_back(std::move(n));
            }
            level = std::move(up);
        }
        root_ = std::move(level.front());
    }

    /// In-order visit; one read per node.
    template <class Fn>
    void scan(Fn&& fn) const {
        if (root_) scan_node(*root_, fn, true);
    }

    /// In-order items without I/O accounting (verification only).
    std::vector<Item> peek_items() const {
        std::vector<Item> out;
        out.reserve(size_);
        auto push = [&](const Item& it) { out.push_back(it); };
        if (root_) scan_node(*root_, push, false);
        return out;
    }

    /// Removes every node without charging.
    void clear() {
        if (root_) free_subtree(*root_);
        root_.reset();
        size_ = 0;
    }

    /// Structural verification: summaries, fill, uniform depth, size.
    bool check(std::string* why = nullptr) const {
        if (!root_) {
            if (size_ != 0) return fail(why, "empty tree with nonzero size");
            return true;
        }
        std::size_t count = 0;
        int depth = -1;
        if (!check_node(*root_, true, 0, depth, count, why)) return false;
        if (count != size_) return fail(why, "item count differs from size");
        return true;
    }

    const Node* root() const { return root_.get(); }

    static Summary summarize(const Node& n) {
        Summary s = Traits::identity();
        if (n.leaf) {
            for (const auto& it : n.items) s = Traits::combine(s, Traits::of(it));
        } else {
            for (const auto& c : n.sums) s = Traits::combine(s, c);
        }
        return s;
    }

private:
    std::size_t min_entries() const { return std::max<std::size_t>(2, (fanout_ + 3) / 4); }

    static std::size_t share(std::size_t total, std::size_t parts, std::size_t i) {
        return total / parts + (i < total % parts ? 1 : 0);
    }

    static bool fail(std::string* why, const char* msg) {
        if (why) *why = msg;
        return false;
    }

    std::unique_ptr<Node> make_node(bool leaf) {
        auto n = std::make_unique<Node>();
        n->id = store_->alloc_block();
        n->leaf = leaf;
        ++nodes_;
        return n;
    }

    void free_node(Node& n) {
        store_->free_block(n.id);
        --nodes_;
    }

    void free_subtree(Node& n) {
        for (auto& k : n.kids) free_subtree(*k);
        free_node(n);
    }

    std::unique_ptr<Node> split(Node& n) {
        auto right = make_node(n.leaf);
        const std::size_t keep = n.entries() / 2;
        if (n.leaf) {
            right->items.assign(std::make_move_iterator(n.items.begin() + static_cast<std::ptrdiff_t>(keep)),
                                std::make_move_iterator(n.items.end()));
            n.items.resize(keep);
        } else {
            for (std::size_t i = keep; i < n.kids.size(); ++i) {
                right->kids.push_back(std::move(n.kids[i]));
                right->sums.push_back(n.sums[i]);
            }
            n.kids.resize(keep);
            n.sums.resize(keep);
        }
        return right;
    }

    static void absorb(Node& left, Node& right) {
        if (left.leaf) {
            for (auto& it : right.items) left.items.push_back(std::move(it));
            right.items.clear();
        } else {
            for (std::size_t i = 0; i < right.kids.size(); ++i) {
                left.kids.push_back(std::move(right.kids[i]));
                left.sums.push_back(right.sums[i]);
            }
            right.kids.clear();
            right.sums.clear();
        }
    }

    // Moves the first entry of right to the end of left.
    static void shift_left(Node& left, Node& right) {
        if (left.leaf) {
            left.items.push_back(std::move(right.items.front()));
            right.items.erase(right.items.begin());
        } else {
            left.kids.push_back(std::move(right.kids.front()));
            left.sums.push_back(right.sums.front());
            right.kids.erase(right.kids.begin());
            right.sums.erase(right.sums.begin());
        }
    }

    // Moves the last entry of left to the front of right.
    static void shift_right(Node& left, Node& right) {
        if (left.leaf) {
            right.items.insert(right.items.begin(), std::move(left.items.back()));
            left.items.pop_back();
        } else {
            right.kids.insert(right.kids.begin(), std::move(left.kids.back()));
            right.sums.insert(right.sums.begin(), left.sums.back());
            left.kids.pop_back();
            left.sums.pop_back();
        }
    }

    template <class Fn>
    void scan_node(const Node& n, Fn& fn, bool charge) const {
        if (charge) store_->access(n.id, Access::read);
        if (n.leaf) {
            for (const auto& it : n.items) fn(it);
            return;
        }
        for (const auto& k : n.kids) scan_node(*k, fn, charge);
    }

    bool check_node(const Node& n, bool is_root, int d, int& leaf_depth, std::size_t& count,
                    std::string* why) const {
        if (!store_->is_live(n.id)) return fail(why, "node block not live");
        if (n.entries() > fanout_) return fail(why, "node over capacity");
        if (!is_root && n.entries() < min_entries()) return fail(why, "node under minimum fill");
        if (n.leaf) {
            if (leaf_depth < 0) leaf_depth = d;
            if (leaf_depth != d) return fail(why, "leaves at different depths");
            count += n.items.size();
            return true;
        }
        if (n.kids.size() != n.sums.size()) return fail(why, "child/summary count mismatch");
        if (is_root && n.kids.size() < 2) return fail(why, "internal root with a single child");
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
            if (!(summarize(*n.kids[i]) == n.sums[i])) return fail(why, "stale child summary");
            if (!check_node(*n.kids[i], false, d + 1, leaf_depth, count, why)) return false;
        }
        return true;
    }

    BlockStore* store_;
    std::size_t fanout_;
    std::unique_ptr<Node> root_;
    std::size_t size_ = 0;
    std::size_t nodes_ = 0;
};

} // namespace lazybtree
