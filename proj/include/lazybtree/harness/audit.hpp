#pragma once

#include "lazybtree/harness/bounds.hpp"
#include "lazybtree/harness/replay.hpp"
#include "lazybtree/interval_structure.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lazybtree::harness {

struct AuditOptions {
    LazyConfig config;
    bool per_op = true;       ///< recompute the potential around every op
    std::size_t sample = 1024; ///< ops between potential samples when per_op is off
    std::optional<double> c1; ///< calibrated constant to hold the trace to
    double tolerance = 0.10;  ///< relative slack on c1
};

struct AuditReport {
    bool ok = true;
    std::vector<std::string> failures;
    std::size_t ops = 0;
    std::size_t inserts_checked = 0;
    std::int64_t max_insert_growth = 0; ///< B times the largest potential increase of one insert
    std::size_t merge_passes = 0;
    std::size_t merges = 0;
    std::size_t bad_drops = 0;
    std::size_t nesting_failures = 0;
    std::size_t count_failures = 0; ///< interval count above its bound after a pass
    std::uint64_t actual_ios = 0; ///< I/Os below the gap structure
    double bound_sum = 0;
    double phi_end = 0;   ///< potential after the last op, in I/Os
    double c1_needed = 0; ///< (actual + phi_end) / bound_sum
    double c1_prefix = 0; ///< same ratio, worst over all sampled op boundaries

    void fail(std::string msg) {
        ok = false;
        if (failures.size() < 16) failures.push_back(std::move(msg));
    }
};

/// Checks every merge pass: exact drop of B per merge, interval count and
/// nesting bounds after.
class MergeAuditor : public MergeObserver {
public:
    explicit MergeAuditor(AuditReport& rep, std::size_t b) : rep_(&rep), b_(b) {}

    void on_merge(const GapIntervals& g, std::uint64_t before, std::uint64_t after, std::size_t merges) override {
        if (merges > 0) {
            ++rep_->merge_passes;
            rep_->merges += merges;
            if (before < after || before - after != merges * b_) {
                ++rep_->bad_drops;
                rep_->fail("merge pass of " + std::to_string(merges) + " merges changed B*phi from " +
                           std::to_string(before) + " to " + std::to_string(after));
            }
        }
        if (g.size() > 0 && static_cast<double>(g.interval_count()) > GapIntervals::interval_bound(g.size()) + 1e-9) {
            ++rep_->count_failures;
            rep_->fail(std::to_string(g.interval_count()) + " intervals for " + std::to_string(g.size()) + " elements");
        }
        std::string why;
        if (!g.nesting_ok(&why)) {
            ++rep_->nesting_failures;
            rep_->fail("nesting bound after merge: " + why);
        }
    }

private:
    AuditReport* rep_;
    std::size_t b_;
};

/// Replays the trace tracking the potential. Starts from an empty
/// structure, so the initial potential is 0. The amortized inequality is
/// taken over the I/Os spent below the gap structure, against the
/// interval-structure formulas.
inline AuditReport potential_audit(std::span<const TraceOp> ops, const AuditOptions& opt = {}) {
    AuditReport rep;
    MergeAuditor auditor(rep, opt.config.block_size);
    Driver d(opt.config, has_pq_ops(ops));
    const Bounds bounds(opt.config.block_size);
    d.tree().set_merge_observer(&auditor);
    d.tree().set_op_listener([&](const OpRecord& r) {
        rep.actual_ios += r.element_ios.total();
        rep.bound_sum += bounds.interval_of(r);
    });
    const double b = static_cast<double>(opt.config.block_size);
    std::uint64_t phi = 0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const TraceOp& op = ops[i];
        LazyBTree& t = d.tree();
        const std::uint64_t n_before = t.size();
        try {
            d.apply(op);
        } catch (const std::exception& e) {
            rep.fail("op " + std::to_string(i) + " (" + to_line(op) + "): " + e.what());
            return rep;
        }
        ++rep.ops;
        if (!opt.per_op && (i + 1) % opt.sample != 0 && i + 1 != ops.size()) continue;
        const std::uint64_t now = t.phi_scaled();
        if (rep.bound_sum > 0)
            rep.c1_prefix = std::max(rep.c1_prefix, (static_cast<double>(rep.actual_ios) + static_cast<double>(now) / b) /
                                                        rep.bound_sum);
        if (!opt.per_op) continue;
        if (op.kind == TraceKind::insert && n_before > 0) {
            const std::int64_t growth = static_cast<std::int64_t>(now) - static_cast<std::int64_t>(phi);
            ++rep.inserts_checked;
            rep.max_insert_growth = std::max(rep.max_insert_growth, growth);
            if (growth > 2)
                rep.fail("op " + std::to_string(i) + ": insert raised B*phi by " + std::to_string(growth));
        }
        phi = now;
    }
    d.tree().set_op_listener(nullptr);
    rep.phi_end = static_cast<double>(d.tree().phi_scaled()) / b;
    rep.c1_needed = rep.bound_sum > 0 ? (static_cast<double>(rep.actual_ios) + rep.phi_end) / rep.bound_sum : 0;
    if (opt.c1 && rep.c1_needed > *opt.c1 * (1 + opt.tolerance))
        rep.fail("amortized inequality needs c1 = " + std::to_string(rep.c1_needed) + ", calibrated " +
                 std::to_string(*opt.c1));
    return rep;
}

} // namespace lazybtree::harness
