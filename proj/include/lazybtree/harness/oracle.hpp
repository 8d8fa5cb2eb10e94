#pragma once

#include "lazybtree/element.hpp"

#include <ext/pb_ds/assoc_container.hpp>
#include <ext/pb_ds/tree_policy.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lazybtree::harness {

/// Sorted multiset of (key, id) with positional rank and select.
class OracleDict {
public:
    void insert(ElemId id, Key key) {
        if (!keys_.emplace(id, key).second) throw ContractError("oracle id inserted twice");
        set_.insert({key, id});
    }

    void erase(ElemId id) {
        const Key k = key_of(id);
        set_.erase(Element{k, id});
        keys_.erase(id);
    }

    void change(ElemId id, Key key) {
        erase(id);
        insert(id, key);
    }

    bool contains(ElemId id) const { return keys_.contains(id); }

    Key key_of(ElemId id) const {
        auto it = keys_.find(id);
        if (it == keys_.end()) throw NotFoundError("oracle has no element " + std::to_string(id));
        return it->second;
    }

    std::uint64_t size() const { return set_.size(); }

    /// Largest element with key <= k and its 1-based rank.
    std::optional<std::pair<std::uint64_t, Element>> predecessor(Key k) const {
        auto it = set_.upper_bound(key_probe(k));
        if (it == set_.begin()) return std::nullopt;
        --it;
        return std::pair{static_cast<std::uint64_t>(set_.order_of_key(*it)) + 1, *it};
    }

    Element select(std::uint64_t r) const {
        if (r < 1 || r > size()) throw RankError("oracle rank out of range");
        return *set_.find_by_order(r - 1);
    }

    std::uint64_t rank_of(const Element& e) const { return set_.order_of_key(e) + 1; }

    Element minimum() const {
        if (set_.empty()) throw EmptyError("oracle is empty");
        return *set_.begin();
    }

    std::vector<Element> contents() const { return {set_.begin(), set_.end()}; }

private:
    using Tree = __gnu_pbds::tree<Element, __gnu_pbds::null_type, std::less<Element>, __gnu_pbds::rb_tree_tag,
                                  __gnu_pbds::tree_order_statistics_node_update>;
    Tree set_;
    std::unordered_map<ElemId, Key> keys_;
};

} // namespace lazybtree::harness
