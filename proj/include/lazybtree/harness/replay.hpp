#pragma once

#include "lazybtree/harness/bounds.hpp"
#include "lazybtree/harness/oracle.hpp"
#include "lazybtree/harness/trace.hpp"
#include "lazybtree/lazy_btree.hpp"
#include "lazybtree/lazy_pq.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lazybtree::harness {

/// Result of a query-like op; `none` when there is no answer (no
/// predecessor, rank out of range, empty queue).
struct Answer {
    bool none = false;
    std::uint64_t rank = 0;
    Key key = 0;
    std::uint64_t ref = 0;

    friend bool operator==(const Answer&, const Answer&) = default;
};

inline std::string describe(const Answer& a) {
    if (a.none) return "no answer";
    return "rank " + std::to_string(a.rank) + " key " + std::to_string(a.key) + " ref " + std::to_string(a.ref);
}

inline bool has_pq_ops(std::span<const TraceOp> ops) {
    return std::any_of(ops.begin(), ops.end(), [](const TraceOp& o) { return is_pq_op(o.kind); });
}

/// Runs trace ops on a LazyBTree (or a LazyPQ for queue traces) and
/// resolves insert refs to handles.
class Driver {
public:
    Driver(const LazyConfig& cfg, bool pq_mode) : bounds_(cfg.block_size) {
        if (pq_mode)
            pq_ = std::make_unique<LazyPQ>(cfg);
        else
            tree_ = std::make_unique<LazyBTree>(cfg);
    }

    bool pq_mode() const { return pq_ != nullptr; }
    LazyBTree& tree() { return pq_ ? pq_->tree() : *tree_; }
    const LazyBTree& tree() const { return pq_ ? pq_->tree() : *tree_; }
    std::uint64_t inserted() const { return handles_.size(); }
    bool live(std::uint64_t ref) const { return ref < live_.size() && live_[ref]; }
    ElementHandle handle(std::uint64_t ref) const { return handles_.at(ref); }
    std::uint64_t ref_of(ElementHandle h) const { return ref_.at(h); }
    /// Formula value of the last applied op (0 if it had no answer).
    double last_bound() const { return bound_; }

    std::optional<Answer> apply(const TraceOp& op) {
        LazyBTree& t = tree();
        const std::uint64_t n = t.size();
        bound_ = 0;
        if (pq_ && !(op.kind == TraceKind::insert || is_pq_op(op.kind)))
            throw TraceError(std::string("dictionary op ") + op_name(op.kind) + " in a priority-queue trace");
        switch (op.kind) {
        case TraceKind::insert: {
            const ElementHandle h = pq_ ? pq_->insert(op.a) : t.insert(op.a);
            if (ref_.size() <= h) ref_.resize(h + 1, 0);
            ref_[h] = handles_.size();
            handles_.push_back(h);
            live_.push_back(1);
            bound_ = pq_ ? bounds_.of_pq(op.kind, n) : bounds_.of(t.last_op());
            return std::nullopt;
        }
        case TraceKind::erase:
            t.erase(checked(op.a));
            live_[op.a] = 0;
            bound_ = bounds_.of(t.last_op());
            return std::nullopt;
        case TraceKind::change_key:
            t.change_key(checked(op.a), op.b);
            bound_ = bounds_.of(t.last_op());
            return std::nullopt;
        case TraceKind::query_element:
            try {
                const QueryResult r = t.query_element(op.a);
                bound_ = bounds_.of(t.last_op());
                return Answer{false, r.rank, r.key, ref_of(r.handle)};
            } catch (const NoPredecessorError&) {
                return Answer{true};
            }
        case TraceKind::query_rank:
            try {
                const QueryResult r = t.query_rank(op.a);
                bound_ = bounds_.of(t.last_op());
                return Answer{false, r.rank, r.key, ref_of(r.handle)};
            } catch (const RankError&) {
                return Answer{true};
            }
        case TraceKind::pq_minimum:
            if (pq_->empty()) return Answer{true};
            {
                const auto [k, h] = pq_->minimum();
                bound_ = bounds_.of_pq(op.kind, n);
                return Answer{false, 1, k, ref_of(h)};
            }
        case TraceKind::pq_delete_min:
            if (pq_->empty()) return Answer{true};
            {
                const ElementHandle h = pq_->minimum().second;
                const Key k = pq_->delete_min();
                live_[ref_of(h)] = 0;
                bound_ = bounds_.of_pq(op.kind, n);
                return Answer{false, 1, k, ref_of(h)};
            }
        case TraceKind::pq_decrease:
            try {
                pq_->decrease_key(checked(op.a), op.b);
            } catch (const ContractError& e) {
                throw TraceError(std::string("invalid decrease: ") + e.what());
            }
            bound_ = bounds_.of_pq(op.kind, n);
            return std::nullopt;
        }
        return std::nullopt;
    }

private:
    ElementHandle checked(std::uint64_t ref) const {
        if (!live(ref)) throw TraceError("ref " + std::to_string(ref) + " is not a live earlier insert");
        return handles_[ref];
    }

    Bounds bounds_;
    std::unique_ptr<LazyBTree> tree_;
    std::unique_ptr<LazyPQ> pq_;
    std::vector<ElementHandle> handles_;
    std::vector<char> live_;
    std::vector<std::uint64_t> ref_;
    double bound_ = 0;
};

struct OpTotals {
    std::uint64_t count = 0;
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    double bound = 0; ///< sum of per-op formula values
    std::uint64_t total() const { return reads + writes; }
};

struct ReplayOptions {
    LazyConfig config;
    std::optional<std::size_t> check_stride; ///< default: 64 up to 10^4 inserts, else 4096
    bool oracle = true;
    bool deep_checks = true;
    /// Called before op i; fault injection in tests.
    std::function<void(std::size_t, Driver&)> before_op;
    MergeObserver* observer = nullptr;
};

struct ReplayReport {
    bool ok = true;
    bool divergence = false;
    std::optional<std::size_t> failed_op;
    std::string failure;
    bool pq_mode = false;
    bool pq_discipline = false;
    std::size_t ops_run = 0;
    std::size_t checks_run = 0;
    std::size_t answers_compared = 0;
    std::array<OpTotals, kTraceKinds> per_op{};
    LazyStats final_stats;
    std::uint64_t peak_n = 0;
    std::size_t blocks_at_peak_n = 0;
    std::size_t peak_blocks = 0;
    std::size_t max_gaps = 0;

    const OpTotals& totals(TraceKind k) const { return per_op[static_cast<std::size_t>(k)]; }
};

inline std::size_t default_check_stride(std::uint64_t inserts) { return inserts <= 10000 ? 64 : 4096; }

/// Every pm is directly followed by pd.
inline bool obeys_pq_discipline(std::span<const TraceOp> ops) {
    for (std::size_t i = 0; i < ops.size(); ++i)
        if (ops[i].kind == TraceKind::pq_minimum && (i + 1 == ops.size() || ops[i + 1].kind != TraceKind::pq_delete_min))
            return false;
    return true;
}

namespace detail {

inline std::optional<std::string> full_check(const Driver& d, const OracleDict* oracle) {
    const CheckReport rep = d.tree().deep_check();
    if (!rep.ok) return "invariant violated: " + (rep.problems.empty() ? std::string("?") : rep.problems.front());
    if (oracle) {
        const auto got = d.tree().elements();
        const auto want = oracle->contents();
        if (got != want) return std::string("contents differ from the oracle");
    }
    return std::nullopt;
}

inline std::optional<Answer> oracle_answer(const TraceOp& op, OracleDict& o, const Driver& d) {
    switch (op.kind) {
    case TraceKind::insert: {
        const std::uint64_t ref = d.inserted() - 1;
        o.insert(d.handle(ref), op.a);
        return std::nullopt;
    }
    case TraceKind::erase: o.erase(d.handle(op.a)); return std::nullopt;
    case TraceKind::change_key:
    case TraceKind::pq_decrease: o.change(d.handle(op.a), op.b); return std::nullopt;
    case TraceKind::query_element: {
        const auto p = o.predecessor(op.a);
        if (!p) return Answer{true};
        return Answer{false, p->first, p->second.key, d.ref_of(p->second.id)};
    }
    case TraceKind::query_rank: {
        if (op.a < 1 || op.a > o.size()) return Answer{true};
        const Element e = o.select(op.a);
        return Answer{false, op.a, e.key, d.ref_of(e.id)};
    }
    case TraceKind::pq_minimum:
    case TraceKind::pq_delete_min: {
        if (o.size() == 0) return Answer{true};
        const Element e = o.minimum();
        if (op.kind == TraceKind::pq_delete_min) o.erase(e.id);
        return Answer{false, 1, e.key, d.ref_of(e.id)};
    }
    }
    return std::nullopt;
}

} // namespace detail

/// Replays the trace against the structure and, in lockstep, the oracle.
/// Stops at the first divergence or invariant failure.
inline ReplayReport replay_and_compare(std::span<const TraceOp> ops, const ReplayOptions& opt = {}) {
    ReplayReport rep;
    rep.pq_mode = has_pq_ops(ops);
    rep.pq_discipline = rep.pq_mode && obeys_pq_discipline(ops);
    const std::uint64_t inserts = static_cast<std::uint64_t>(
        std::count_if(ops.begin(), ops.end(), [](const TraceOp& o) { return o.kind == TraceKind::insert; }));
    const std::size_t stride = opt.check_stride.value_or(default_check_stride(inserts));

    Driver d(opt.config, rep.pq_mode);
    if (opt.observer) d.tree().set_merge_observer(opt.observer);
    std::optional<OracleDict> oracle;
    if (opt.oracle) oracle.emplace();
    const OracleDict* oracle_ptr = oracle ? &*oracle : nullptr;

    auto fail = [&](std::size_t i, std::string msg, bool diverged) {
        rep.ok = false;
        rep.divergence = diverged;
        rep.failed_op = i;
        rep.failure = "op " + std::to_string(i) + " (" + to_line(ops[i]) + "): " + std::move(msg);
    };

    for (std::size_t i = 0; i < ops.size(); ++i) {
        const TraceOp& op = ops[i];
        if (opt.before_op) opt.before_op(i, d);
        const IoCounters before = d.tree().store().counters();
        std::optional<Answer> got;
        try {
            got = d.apply(op);
        } catch (const TraceError& e) {
            fail(i, e.what(), false);
            break;
        } catch (const std::logic_error& e) {
            fail(i, std::string("structure error: ") + e.what(), false);
            break;
        }
        const IoCounters delta = d.tree().store().counters() - before;
        OpTotals& tot = rep.per_op[static_cast<std::size_t>(op.kind)];
        ++tot.count;
        tot.reads += delta.reads;
        tot.writes += delta.writes;
        tot.bound += d.last_bound();
        ++rep.ops_run;

        if (oracle) {
            const std::optional<Answer> want = detail::oracle_answer(op, *oracle, d);
            if (want) {
                ++rep.answers_compared;
                if (!got || *got != *want) {
                    fail(i, "expected " + describe(*want) + ", got " + (got ? describe(*got) : "nothing"), true);
                    break;
                }
            }
        }

        const LazyBTree& t = d.tree();
        rep.max_gaps = std::max(rep.max_gaps, t.gap_count());
        const std::size_t blocks = t.store().allocated_blocks();
        rep.peak_blocks = std::max(rep.peak_blocks, blocks);
        if (t.size() > rep.peak_n) {
            rep.peak_n = t.size();
            rep.blocks_at_peak_n = blocks;
        }
        if (rep.pq_discipline) {
            if (t.gap_count() > 2) {
                fail(i, "priority queue holds " + std::to_string(t.gap_count()) + " gaps", false);
                break;
            }
            if (op.kind == TraceKind::pq_delete_min && t.gap_count() > 1) {
                fail(i, "more than one gap after delete_min", false);
                break;
            }
            if (op.kind == TraceKind::pq_delete_min && !t.empty() && t.gaps().front().side != Sidedness::one_left) {
                fail(i, "remaining gap is not one-sided on the left", false);
                break;
            }
        }
        if (opt.deep_checks && stride > 0 && (i + 1) % stride == 0) {
            ++rep.checks_run;
            if (auto bad = detail::full_check(d, oracle_ptr)) {
                fail(i, *bad, false);
                break;
            }
        }
    }
    if (rep.ok && opt.deep_checks) {
        ++rep.checks_run;
        if (auto bad = detail::full_check(d, oracle_ptr)) {
            rep.ok = false;
            rep.failed_op = ops.size();
            rep.failure = "final check: " + *bad;
        }
    }
    rep.final_stats = d.tree().stats();
    return rep;
}

} // namespace lazybtree::harness
