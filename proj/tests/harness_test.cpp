#include "lazybtree/harness/audit.hpp"
#include "lazybtree/harness/scaling.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

using namespace lazybtree;
using namespace lazybtree::harness;

namespace {

std::string text_of(const std::vector<TraceOp>& ops) {
    std::ostringstream out;
    write_trace(out, ops);
    return out.str();
}

std::size_t count_kind(const std::vector<TraceOp>& ops, TraceKind k) {
    return static_cast<std::size_t>(std::count_if(ops.begin(), ops.end(), [&](const TraceOp& o) { return o.kind == k; }));
}

} // namespace

TEST(Trace, RoundTrip) {
    const std::vector<TraceOp> ops{TraceOp::insert(10),        TraceOp::erase(0),        TraceOp::change(1, 7),
                                   TraceOp::query_element(99), TraceOp::query_rank(3),   TraceOp::pq_minimum(),
                                   TraceOp::pq_delete_min(),   TraceOp::pq_decrease(2, 1)};
    const std::string s = text_of(ops);
    EXPECT_EQ(s, "i 10\nd 0\nc 1 7\nqe 99\nqr 3\npm\npd\npk 2 1\n");
    std::istringstream in("# comment\n\n" + s);
    EXPECT_EQ(read_trace(in), ops);
}

TEST(Trace, RejectsGarbage) {
    EXPECT_THROW(parse_line("x 1"), TraceError);
    EXPECT_THROW(parse_line("i"), TraceError);
    EXPECT_THROW(parse_line("i 1 2"), TraceError);
    EXPECT_THROW(parse_line("i -3"), TraceError);
    EXPECT_THROW(parse_line("qr 1x"), TraceError);
}

TEST(Workload, Deterministic) {
    EXPECT_EQ(text_of(gen_workload(WorkloadKind::pq, 100, 100, 7)), text_of(gen_workload(WorkloadKind::pq, 100, 100, 7)));
    EXPECT_NE(text_of(gen_workload(WorkloadKind::pq, 100, 100, 7)), text_of(gen_workload(WorkloadKind::pq, 100, 100, 8)));
}

TEST(Workload, Counts) {
    const auto mixed = gen_workload(WorkloadKind::uniform_mixed, 1000, 300, 1);
    EXPECT_EQ(count_kind(mixed, TraceKind::insert), 1000u);
    EXPECT_EQ(count_kind(mixed, TraceKind::query_element) + count_kind(mixed, TraceKind::query_rank), 300u);
    EXPECT_EQ(count_kind(mixed, TraceKind::erase), 250u);
    EXPECT_EQ(count_kind(mixed, TraceKind::change_key), 250u);

    const auto drain = gen_workload(WorkloadKind::drain, 50, 50, 3);
    ASSERT_EQ(drain.size(), 100u);
    for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(drain[i].kind, TraceKind::insert);
    for (std::size_t i = 50; i < 100; ++i) EXPECT_EQ(drain[i].kind, TraceKind::pq_delete_min);

    const auto clustered = gen_workload(WorkloadKind::clustered_queries, 4096, std::nullopt, 2);
    EXPECT_EQ(count_kind(clustered, TraceKind::query_rank), 256u);
    EXPECT_TRUE(obeys_pq_discipline(gen_workload(WorkloadKind::pq, 2000, std::nullopt, 4)));
}

TEST(Replay, SmallExample) {
    const std::vector<TraceOp> ops{TraceOp::insert(10), TraceOp::insert(20), TraceOp::insert(30),
                                   TraceOp::query_rank(2)};
    ReplayOptions opt;
    opt.config.block_size = 4;
    const ReplayReport rep = replay_and_compare(ops, opt);
    EXPECT_TRUE(rep.ok) << rep.failure;
    EXPECT_EQ(rep.answers_compared, 1u);
    EXPECT_EQ(rep.final_stats.gaps, 2u);
}

TEST(Replay, MixedAgreesWithOracle) {
    for (std::size_t b : {4, 16}) {
        ReplayOptions opt;
        opt.config.block_size = b;
        const auto ops = gen_workload(WorkloadKind::uniform_mixed, 3000, std::nullopt, b);
        const ReplayReport rep = replay_and_compare(ops, opt);
        EXPECT_TRUE(rep.ok) << rep.failure;
        EXPECT_GT(rep.checks_run, 40u);
        std::uint64_t total = 0;
        for (const auto& t : rep.per_op) total += t.total();
        EXPECT_EQ(total, rep.final_stats.io_reads + rep.final_stats.io_writes);
    }
}

TEST(Replay, PqWorkloads) {
    ReplayOptions opt;
    opt.config.block_size = 8;
    for (auto kind : {WorkloadKind::pq, WorkloadKind::drain}) {
        const ReplayReport rep = replay_and_compare(gen_workload(kind, 3000, std::nullopt, 5), opt);
        EXPECT_TRUE(rep.ok) << rep.failure;
        EXPECT_TRUE(rep.pq_discipline);
        EXPECT_LE(rep.max_gaps, 2u);
    }
}

TEST(Replay, CorruptionIsReportedAtTheOp) {
    const auto ops = gen_workload(WorkloadKind::uniform_queries, 500, 200, 9);
    ReplayOptions opt;
    opt.config.block_size = 4;
    opt.deep_checks = false;
    opt.before_op = [&](std::size_t i, Driver& d) {
        if (i == 600) {
            // bump the key the next query will return, behind the structure's back
            const Element e = d.tree().elements().at(ops[600].a - 1);
            d.tree().debug_overwrite_key(e.id, e.key + 1);
        }
    };
    const ReplayReport rep = replay_and_compare(ops, opt);
    EXPECT_FALSE(rep.ok);
    EXPECT_TRUE(rep.divergence);
    ASSERT_TRUE(rep.failed_op.has_value());
    EXPECT_EQ(*rep.failed_op, 600u);
}

TEST(Replay, BadRefIsATraceError) {
    const std::vector<TraceOp> ops{TraceOp::insert(1), TraceOp::erase(0), TraceOp::erase(0)};
    const ReplayReport rep = replay_and_compare(ops);
    EXPECT_FALSE(rep.ok);
    EXPECT_FALSE(rep.divergence);
    EXPECT_EQ(rep.failed_op, 2u);
}

// The deep checker must catch each class of injected damage.
TEST(DeepCheck, CatchesInjectedFaults) {
    auto fresh = [] {
        auto t = std::make_unique<LazyBTree>(LazyConfig{.block_size = 4});
        for (Key k = 0; k < 400; ++k) t->insert((k * 7919) % 1000);
        for (std::uint64_t r = 40; r <= 400; r += 40) t->query_rank(r);
        return t;
    };
    {
        auto t = fresh();
        EXPECT_TRUE(t->deep_check().ok);
    }
    {
        auto t = fresh();
        const GapId g = t->gaps()[3].id;
        t->debug_gaps().debug_corrupt_hole(g, 1);
        EXPECT_FALSE(t->deep_check().ok);
    }
    {
        auto t = fresh();
        const Element e = t->gap_elements(t->gaps()[2].id).front();
        t->debug_overwrite_key(e.id, 999999);
        EXPECT_FALSE(t->deep_check().ok);
    }
    {
        auto t = fresh();
        const Element e = t->gap_elements(t->gaps().back().id).front();
        t->debug_overwrite_key(e.id, 0);
        EXPECT_FALSE(t->deep_check().ok);
    }
}

TEST(Scaling, CsvRoundTrip) {
    LazyConfig cfg;
    cfg.block_size = 16;
    const auto rows = run_scaling(WorkloadKind::drain, {256, 512}, cfg, 1);
    ASSERT_FALSE(rows.empty());
    std::stringstream ss;
    write_csv(ss, rows);
    EXPECT_EQ(read_csv(ss), rows);
    for (const auto& r : rows) EXPECT_GT(r.bound, 0.0);
}

TEST(Audit, InsertOnlyGrowth) {
    std::vector<TraceOp> ops;
    for (Key k = 0; k < 3000; ++k) ops.push_back(TraceOp::insert((k * 2654435761u) % 100000));
    for (std::uint64_t r = 100; r < 3000; r += 300) ops.push_back(TraceOp::query_rank(r));
    for (Key k = 0; k < 3000; ++k) ops.push_back(TraceOp::insert((k * 40503u) % 100000));
    AuditOptions opt;
    opt.config.block_size = 8;
    const AuditReport rep = potential_audit(ops, opt);
    EXPECT_TRUE(rep.ok) << (rep.failures.empty() ? "" : rep.failures.front());
    EXPECT_EQ(rep.inserts_checked, 5999u);
    EXPECT_LE(rep.max_insert_growth, 2);
}

TEST(Audit, DeleteHeavyMergesDropExactly) {
    std::vector<TraceOp> ops;
    for (Key k = 0; k < 4000; ++k) ops.push_back(TraceOp::insert((k * 7919u) % 4000));
    ops.push_back(TraceOp::query_rank(1));
    // empty the middle of the right gap so its intervals fall below their outside
    for (std::uint64_t r = 0; r < 4000; ++r) {
        const Key k = (r * 7919u) % 4000;
        if (k >= 1100 && k < 3500) ops.push_back(TraceOp::erase(r));
    }
    AuditOptions opt;
    opt.config.block_size = 4;
    const AuditReport rep = potential_audit(ops, opt);
    EXPECT_TRUE(rep.ok) << (rep.failures.empty() ? "" : rep.failures.front());
    EXPECT_GT(rep.merges, 0u);
    EXPECT_EQ(rep.bad_drops, 0u);
    EXPECT_EQ(rep.nesting_failures, 0u);
}
