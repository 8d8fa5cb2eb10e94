#pragma once

#include "lazybtree/harness/trace.hpp"
#include "lazybtree/lazy_btree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace lazybtree::harness {

/// Cost formulas without constants; every one carries a +1 for the
/// constant term.
class Bounds {
public:
    explicit Bounds(std::size_t b) : b_(static_cast<double>(b)), lnb_(std::log(static_cast<double>(b))) {}

    double log_b(double x) const { return std::log(std::max(x, 1.0)) / lnb_; }
    static double lg(double x) { return std::log2(std::max(x, 2.0)); }
    double loglog_b(double w) const { return log_b(log_b(std::max(w, b_))); }

    double construct(double n) const { return 1 + n / b_; }
    double insert(double n, double w) const { return 1 + log_b(n / w) + loglog_b(w); }
    double erase(double n, double w) const { return 1 + log_b(n / w) + lg(w) / b_ + loglog_b(w); }
    double change_toward(double w) const { return 1 + loglog_b(w); }
    double change_away(double w) const { return 1 + lg(w) / b_ + loglog_b(w); }
    double query(double n, double q, double w, double x, double c) const {
        return 1 + log_b(std::min(n, q)) + lg(w) / b_ + loglog_b(w) + x * std::log2(std::max(c, 1.0)) / b_;
    }
    double pq_insert(double n) const { return 1 + loglog_b(n); }
    double pq_delete(double n) const { return 1 + lg(n) / b_ + loglog_b(n); }
    double pq_decrease(double n) const { return 1 + loglog_b(n); }

    /// Formula for a finished dictionary operation, from its record.
    double of(const OpRecord& r) const {
        const double n = static_cast<double>(std::max<std::uint64_t>(r.n, 1));
        const double w = static_cast<double>(std::max<std::uint64_t>(r.gap_weight, 1));
        switch (r.kind) {
        case OpKind::construct: return construct(n);
        case OpKind::insert: return insert(n + 1, w);
        case OpKind::erase: return erase(n, w);
        case OpKind::change_key:
            if (r.degraded) return erase(n, w) + insert(n, w);
            return r.toward ? change_toward(w) : change_away(w);
        case OpKind::query_element:
        case OpKind::query_rank: {
            const double x = r.split ? static_cast<double>(r.split->x()) : 0.0;
            const double c = r.split ? r.split->c() : 1.0;
            return query(n, static_cast<double>(r.q + 1), w, x, c);
        }
        }
        return 1;
    }

    /// Formula for the interval-structure part of a dictionary operation:
    /// what remains of `of` once the gap has been found.
    double interval_of(const OpRecord& r) const {
        const double w = static_cast<double>(std::max<std::uint64_t>(r.gap_weight, 1));
        const double shuffle = 1 + lg(w) / b_ + loglog_b(w);
        switch (r.kind) {
        case OpKind::construct: return construct(static_cast<double>(std::max<std::uint64_t>(r.n, 1)));
        case OpKind::insert: return 1 + loglog_b(w);
        case OpKind::erase: return shuffle;
        case OpKind::change_key:
            if (r.degraded) return shuffle + 1 + loglog_b(w);
            return r.toward ? change_toward(w) : change_away(w);
        case OpKind::query_element:
        case OpKind::query_rank:
            if (!r.split) return 1;
            return shuffle + static_cast<double>(r.split->x()) * std::log2(std::max(r.split->c(), 1.0)) / b_;
        }
        return 1;
    }

    /// Formula for a priority-queue operation on a queue of n elements.
    double of_pq(TraceKind k, std::uint64_t n) const {
        const double nn = static_cast<double>(std::max<std::uint64_t>(n, 1));
        switch (k) {
        case TraceKind::insert: return pq_insert(nn + 1);
        case TraceKind::pq_minimum:
        case TraceKind::pq_delete_min: return pq_delete(nn);
        case TraceKind::pq_decrease: return pq_decrease(nn);
        default: return 1;
        }
    }

private:
    double b_;
    double lnb_;
};

} // namespace lazybtree::harness
