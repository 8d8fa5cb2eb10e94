// lbt: replay, benchmark, trace generation and potential audit for lazy B-trees.

#include "lazybtree/harness/audit.hpp"
#include "lazybtree/harness/scaling.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace lazybtree;
using namespace lazybtree::harness;

namespace {

enum Exit { ok = 0, failed = 1, usage = 2 };

struct Common {
    std::size_t block_size = 64;
    std::size_t memory = 16384;
    std::string cache = "off";
    std::string workload = "uniform-mixed";
    std::uint64_t n = 10000;
    std::optional<std::uint64_t> q;
    std::uint64_t seed = 1;
    std::string trace;

    LazyConfig config() const { return {block_size, memory, cache == "on"}; }
};

void add_config(CLI::App* app, Common& c) {
    app->add_option("--block-size", c.block_size, "elements per block (B)")->check(CLI::Range(2, 1 << 20));
    app->add_option("--memory", c.memory, "internal memory in elements (M)");
    app->add_option("--cache", c.cache, "simulate an LRU cache of M/B blocks")->check(CLI::IsMember({"on", "off"}));
}

void add_workload(CLI::App* app, Common& c) {
    app->add_option("--workload", c.workload, "pq, uniform-mixed, clustered-queries, uniform-queries or drain");
    app->add_option("--n", c.n, "inserts in the generated trace");
    app->add_option("--q", c.q, "queries (delete-mins for queue workloads)");
    app->add_option("--seed", c.seed, "generator seed");
}

// "1024,2^14,65536"
std::vector<std::uint64_t> parse_sizes(const std::string& s) {
    std::vector<std::uint64_t> out;
    std::size_t i = 0;
    while (i <= s.size()) {
        const std::size_t j = std::min(s.find(',', i), s.size());
        const std::string w = s.substr(i, j - i);
        if (!w.empty()) {
            const auto caret = w.find('^');
            if (caret == std::string::npos) {
                out.push_back(std::stoull(w));
            } else {
                const auto base = std::stoull(w.substr(0, caret));
                const auto exp = std::stoull(w.substr(caret + 1));
                std::uint64_t v = 1;
                for (std::uint64_t k = 0; k < exp; ++k) v *= base;
                out.push_back(v);
            }
        }
        i = j + 1;
    }
    if (out.empty()) throw CLI::ValidationError("--sizes", "no sizes given");
    return out;
}

std::vector<TraceOp> load_or_generate(const Common& c) {
    if (!c.trace.empty()) {
        std::ifstream in(c.trace);
        if (!in) throw TraceError("cannot open trace " + c.trace);
        return read_trace(in);
    }
    return gen_workload(parse_workload(c.workload), c.n, c.q, c.seed);
}

void print_totals(const ReplayReport& rep) {
    for (std::size_t k = 0; k < kTraceKinds; ++k) {
        const OpTotals& t = rep.per_op[k];
        if (t.count == 0) continue;
        std::cout << "  " << op_name(static_cast<TraceKind>(k)) << ": count " << t.count << ", I/Os " << t.total()
                  << " (" << t.reads << " r, " << t.writes << " w), mean "
                  << static_cast<double>(t.total()) / static_cast<double>(t.count) << "\n";
    }
}

int run_verify(const Common& c, std::optional<std::size_t> stride) {
    const auto ops = load_or_generate(c);
    ReplayOptions opt;
    opt.config = c.config();
    opt.check_stride = stride;
    const ReplayReport rep = replay_and_compare(ops, opt);
    std::cout << "ops " << rep.ops_run << "/" << ops.size() << ", answers compared " << rep.answers_compared
              << ", deep checks " << rep.checks_run << ", N " << rep.final_stats.n << ", gaps "
              << rep.final_stats.gaps << ", blocks " << rep.final_stats.allocated_blocks << "\n";
    print_totals(rep);
    if (!rep.ok) {
        std::cout << (rep.divergence ? "DIVERGENCE " : "FAILURE ") << rep.failure << "\n";
        return failed;
    }
    std::cout << "OK\n";
    return ok;
}

int run_bench(const Common& c, const std::string& sizes, const std::string& csv_out) {
    const auto rows = run_scaling(parse_workload(c.workload), parse_sizes(sizes), c.config(), c.seed, c.q);
    if (csv_out.empty() || csv_out == "-") {
        write_csv(std::cout, rows);
    } else {
        std::ofstream out(csv_out);
        if (!out) throw TraceError("cannot write " + csv_out);
        write_csv(out, rows);
        std::cout << "wrote " << rows.size() << " rows to " << csv_out << "\n";
    }
    return ok;
}

int run_trace_gen(const Common& c) {
    const auto ops = gen_workload(parse_workload(c.workload), c.n, c.q, c.seed);
    if (c.trace.empty() || c.trace == "-") {
        write_trace(std::cout, ops);
    } else {
        std::ofstream out(c.trace);
        if (!out) throw TraceError("cannot write " + c.trace);
        write_trace(out, ops);
    }
    return ok;
}

void print_audit(const AuditReport& r, const std::string& label) {
    std::cout << label << "ops " << r.ops << ", inserts checked " << r.inserts_checked << ", max insert growth "
              << r.max_insert_growth << "/B, merge passes " << r.merge_passes << ", merges " << r.merges
              << ", bad drops " << r.bad_drops << ", nesting failures " << r.nesting_failures << ", interval I/Os "
              << r.actual_ios << ", bound sum " << r.bound_sum << ", c1 needed " << r.c1_needed << " (worst prefix "
              << r.c1_prefix << ")\n";
    for (const auto& f : r.failures) std::cout << "  " << f << "\n";
}

// With --sizes: calibrate c1 on the first size, hold the others to it.
int run_audit(const Common& c, const std::string& sizes) {
    AuditOptions opt;
    opt.config = c.config();
    if (sizes.empty()) {
        const AuditReport r = potential_audit(load_or_generate(c), opt);
        print_audit(r, "");
        std::cout << (r.ok ? "OK\n" : "FAILED\n");
        return r.ok ? ok : failed;
    }
    bool all = true;
    const auto ns = parse_sizes(sizes);
    const WorkloadKind kind = parse_workload(c.workload);
    for (std::size_t i = 0; i < ns.size(); ++i) {
        opt.per_op = ns[i] <= (1u << 15);
        const AuditReport r = potential_audit(gen_workload(kind, ns[i], c.q, c.seed), opt);
        print_audit(r, "N=" + std::to_string(ns[i]) + ": ");
        if (i == 0) opt.c1 = r.c1_needed;
        all = all && r.ok;
    }
    std::cout << (all ? "OK\n" : "FAILED\n");
    return all ? ok : failed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lazy B-tree replay and benchmark tool"};
    app.require_subcommand(1);
    Common c;
    std::optional<std::size_t> stride;
    std::string sizes = "2^10,2^12,2^14,2^16";
    std::string audit_sizes;
    std::string csv_out;

    auto* verify = app.add_subcommand("verify", "replay a trace against the oracle with deep checks");
    add_config(verify, c);
    add_workload(verify, c);
    verify->add_option("--trace", c.trace, "trace file (default: generate one)");
    verify->add_option("--check-stride", stride, "ops between deep checks (0: only at the end)");

    auto* bench = app.add_subcommand("bench", "I/O scaling report as CSV");
    add_config(bench, c);
    add_workload(bench, c);
    bench->add_option("--sizes", sizes, "comma separated N values, 2^k allowed");
    bench->add_option("--csv-out", csv_out, "output file (default: stdout)");

    auto* tgen = app.add_subcommand("trace-gen", "write a generated trace");
    add_workload(tgen, c);
    tgen->add_option("--trace", c.trace, "output file (default: stdout)");

    auto* audit = app.add_subcommand("audit", "potential-function audit");
    add_config(audit, c);
    add_workload(audit, c);
    audit->add_option("--trace", c.trace, "trace file (default: generate one)");
    audit->add_option("--sizes", audit_sizes, "calibrate on the first size, check the rest");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*verify) return run_verify(c, stride);
        if (*bench) return run_bench(c, sizes, csv_out);
        if (*tgen) return run_trace_gen(c);
        if (*audit) return run_audit(c, audit_sizes);
    } catch (const TraceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return failed;
    }
    return usage;
}
