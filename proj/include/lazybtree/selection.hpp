#pragma once

#include "lazybtree/block_store.hpp"
#include "lazybtree/element.hpp"

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace lazybtree {

namespace detail {

inline Element median_of_five(std::span<Element> g) {
    std::sort(g.begin(), g.end());
    return g[(g.size() - 1) / 2];
}

// Median-of-medians selection of the k-th smallest (0-based) of v.
// Every pass over m elements is charged as a scan of m elements plus a
// write of the surviving part, so the total is O(n/B) I/Os.
inline Element bfprt(std::vector<Element>& v, std::size_t k, BlockStore* store) {
    while (true) {
        const std::size_t n = v.size();
        if (n <= 5) {
            std::sort(v.begin(), v.end());
            return v[k];
        }
        if (store) store->charge_stream(n, Access::read);
        std::vector<Element> medians;
        medians.reserve(n / 5 + 1);
        for (std::size_t i = 0; i < n; i += 5) {
            const std::size_t len = std::min<std::size_t>(5, n - i);
            medians.push_back(median_of_five(std::span<Element>(v.data() + i, len)));
        }
        if (store) store->charge_stream(medians.size(), Access::write);
        const Element pivot = bfprt(medians, (medians.size() - 1) / 2, store);

        if (store) store->charge_stream(n, Access::read);
        std::vector<Element> less, greater;
        std::size_t equal = 0;
        for (const auto& e : v) {
            if (e < pivot)
                less.push_back(e);
            else if (pivot < e)
                greater.push_back(e);
            else
                ++equal;
        }
        if (k < less.size()) {
            if (store) store->charge_stream(less.size(), Access::write);
            v = std::move(less);
        } else if (k < less.size() + equal) {
            return pivot;
        } else {
            if (store) store->charge_stream(greater.size(), Access::write);
            k -= less.size() + equal;
            v = std::move(greater);
        }
    }
}

} // namespace detail

/// k-th smallest element (1-based k) of an unsorted batch, deterministic
/// linear-time selection. Scratch passes are charged to `store` if given.
inline Element select_kth(std::vector<Element> v, std::size_t k, BlockStore* store = nullptr) {
    if (k < 1 || k > v.size()) throw RankError("selection rank out of range");
    return detail::bfprt(v, k - 1, store);
}

/// Splits `v` into (elements <= pivot, elements > pivot); one charged pass.
inline std::pair<std::vector<Element>, std::vector<Element>>
partition_at(const std::vector<Element>& v, const Element& pivot, BlockStore* store = nullptr) {
    std::vector<Element> lo, hi;
    for (const auto& e : v) (e <= pivot ? lo : hi).push_back(e);
    if (store) {
        store->charge_stream(v.size(), Access::read);
        store->charge_stream(v.size(), Access::write);
    }
    return {std::move(lo), std::move(hi)};
}

} // namespace lazybtree
