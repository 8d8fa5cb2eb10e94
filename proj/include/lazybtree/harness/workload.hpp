#pragma once

#include "lazybtree/harness/trace.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace lazybtree::harness {

enum class WorkloadKind : std::uint8_t { pq, uniform_mixed, clustered_queries, uniform_queries, drain };

inline const char* to_string(WorkloadKind k) {
    switch (k) {
    case WorkloadKind::pq: return "pq";
    case WorkloadKind::uniform_mixed: return "uniform-mixed";
    case WorkloadKind::clustered_queries: return "clustered-queries";
    case WorkloadKind::uniform_queries: return "uniform-queries";
    case WorkloadKind::drain: return "drain";
    }
    return "?";
}

inline WorkloadKind parse_workload(const std::string& s) {
    for (auto k : {WorkloadKind::pq, WorkloadKind::uniform_mixed, WorkloadKind::clustered_queries,
                   WorkloadKind::uniform_queries, WorkloadKind::drain})
        if (s == to_string(k)) return k;
    throw TraceError("unknown workload '" + s + "'");
}

/// Number of queries (or delete-mins) used when none is given.
inline std::uint64_t default_q(WorkloadKind k, std::uint64_t n) {
    switch (k) {
    case WorkloadKind::pq: return n / 2;
    case WorkloadKind::uniform_mixed: return n / 2;
    case WorkloadKind::clustered_queries:
    case WorkloadKind::uniform_queries: return std::max<std::uint64_t>(1, n / 16);
    case WorkloadKind::drain: return n;
    }
    return 0;
}

namespace detail {

// Live insert refs with O(1) random pick and removal.
class LiveSet {
public:
    void add(std::uint64_t ref) {
        if (pos_.size() <= ref) pos_.resize(ref + 1, kNone);
        pos_[ref] = refs_.size();
        refs_.push_back(ref);
    }
    void remove(std::uint64_t ref) {
        const std::size_t i = pos_[ref];
        pos_[refs_.back()] = i;
        refs_[i] = refs_.back();
        refs_.pop_back();
        pos_[ref] = kNone;
    }
    std::uint64_t pick(std::mt19937_64& rng) const { return refs_[rng() % refs_.size()]; }
    std::size_t size() const { return refs_.size(); }
    bool empty() const { return refs_.empty(); }

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::uint64_t> refs_;
    std::vector<std::size_t> pos_;
};

// Picks an index with probability proportional to the remaining counts;
// counts whose precondition fails are skipped.
template <std::size_t K>
std::size_t weighted_pick(std::mt19937_64& rng, const std::array<std::uint64_t, K>& left,
                          const std::array<bool, K>& allowed) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < K; ++i)
        if (allowed[i]) total += left[i];
    if (total == 0) return K;
    std::uint64_t x = rng() % total;
    for (std::size_t i = 0; i < K; ++i) {
        if (!allowed[i]) continue;
        if (x < left[i]) return i;
        x -= left[i];
    }
    return K;
}

inline constexpr std::uint64_t kKeyRange = std::uint64_t{1} << 32;

inline std::vector<TraceOp> uniform_mixed(std::uint64_t n, std::uint64_t q, std::mt19937_64& rng) {
    std::vector<TraceOp> ops;
    LiveSet live;
    std::array<std::uint64_t, 4> left{n, q, n / 4, n / 4}; // insert, query, delete, change
    std::uint64_t next_ref = 0;
    while (true) {
        const bool have = !live.empty();
        const std::size_t pick = weighted_pick<4>(rng, left, {true, have, have, have});
        if (pick == 4) break;
        --left[pick];
        switch (pick) {
        case 0:
            ops.push_back(TraceOp::insert(rng() % kKeyRange));
            live.add(next_ref++);
            break;
        case 1:
            if (rng() % 2 == 0)
                ops.push_back(TraceOp::query_element(rng() % kKeyRange));
            else
                ops.push_back(TraceOp::query_rank(1 + rng() % live.size()));
            break;
        case 2: {
            const auto r = live.pick(rng);
            live.remove(r);
            ops.push_back(TraceOp::erase(r));
            break;
        }
        default: ops.push_back(TraceOp::change(live.pick(rng), rng() % kKeyRange)); break;
        }
    }
    return ops;
}

// n inserts, then q rank queries drawn from `windows` rank windows of
// the given width (windows == 0: uniform over all ranks).
inline std::vector<TraceOp> query_phase(std::uint64_t n, std::uint64_t q, std::uint64_t windows, std::uint64_t width,
                                        std::mt19937_64& rng) {
    std::vector<TraceOp> ops;
    ops.reserve(n + q);
    for (std::uint64_t i = 0; i < n; ++i) ops.push_back(TraceOp::insert(rng() % kKeyRange));
    if (n == 0) return ops;
    width = std::clamp<std::uint64_t>(width, 1, n);
    std::vector<std::uint64_t> starts;
    for (std::uint64_t w = 0; w < windows; ++w) starts.push_back(1 + rng() % (n - width + 1));
    for (std::uint64_t i = 0; i < q; ++i) {
        if (windows == 0)
            ops.push_back(TraceOp::query_rank(1 + rng() % n));
        else
            ops.push_back(TraceOp::query_rank(starts[rng() % windows] + rng() % width));
    }
    return ops;
}

inline std::vector<TraceOp> pq(std::uint64_t n, std::uint64_t q, std::mt19937_64& rng) {
    std::vector<TraceOp> ops;
    std::set<std::pair<std::uint64_t, std::uint64_t>> heap; // (key, ref)
    std::vector<std::uint64_t> key;
    LiveSet live;
    std::array<std::uint64_t, 3> left{n, q, q / 2}; // insert, delete-min, decrease
    while (true) {
        const bool have = !heap.empty();
        const std::size_t pick = weighted_pick<3>(rng, left, {true, have, have});
        if (pick == 3) break;
        --left[pick];
        if (pick == 0) {
            const std::uint64_t k = rng() % (kKeyRange << 8);
            const std::uint64_t ref = key.size();
            key.push_back(k);
            heap.insert({k, ref});
            live.add(ref);
            ops.push_back(TraceOp::insert(k));
        } else if (pick == 1) {
            if (rng() % 4 == 0) ops.push_back(TraceOp::pq_minimum());
            ops.push_back(TraceOp::pq_delete_min());
            live.remove(heap.begin()->second);
            heap.erase(heap.begin());
        } else {
            const std::uint64_t ref = live.pick(rng);
            const std::uint64_t k = key[ref] - rng() % (key[ref] / 2 + 1);
            heap.erase({key[ref], ref});
            heap.insert({k, ref});
            key[ref] = k;
            ops.push_back(TraceOp::pq_decrease(ref, k));
        }
    }
    return ops;
}

inline std::vector<TraceOp> drain(std::uint64_t n, std::uint64_t q, std::mt19937_64& rng) {
    std::vector<TraceOp> ops;
    ops.reserve(n + q);
    for (std::uint64_t i = 0; i < n; ++i) ops.push_back(TraceOp::insert(rng() % (kKeyRange << 8)));
    for (std::uint64_t i = 0; i < std::min(q, n); ++i) ops.push_back(TraceOp::pq_delete_min());
    return ops;
}

} // namespace detail

/// Deterministic trace for (kind, n, q, seed); q defaults per kind.
inline std::vector<TraceOp> gen_workload(WorkloadKind kind, std::uint64_t n, std::optional<std::uint64_t> q,
                                         std::uint64_t seed) {
    if (n < 1) throw TraceError("workload needs n >= 1");
    std::mt19937_64 rng(seed);
    const std::uint64_t qq = q.value_or(default_q(kind, n));
    switch (kind) {
    case WorkloadKind::pq: return detail::pq(n, qq, rng);
    case WorkloadKind::uniform_mixed: return detail::uniform_mixed(n, qq, rng);
    case WorkloadKind::clustered_queries: return detail::query_phase(n, qq, 4, std::max<std::uint64_t>(1, n / 1024), rng);
    case WorkloadKind::uniform_queries: return detail::query_phase(n, qq, 0, n, rng);
    case WorkloadKind::drain: return detail::drain(n, qq, rng);
    }
    return {};
}

} // namespace lazybtree::harness
