#pragma once

#include "lazybtree/harness/replay.hpp"
#include "lazybtree/harness/workload.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace lazybtree::harness {

/// One CSV row: totals of one op kind in one run.
struct ReportRow {
    std::string workload;
    std::uint64_t n = 0;
    std::size_t b = 0;
    std::size_t m = 0;
    std::string op;
    std::uint64_t count = 0;
    std::uint64_t total_ios = 0;
    double mean_ios = 0;
    double bound = 0; ///< formula summed over the ops of the row

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

inline constexpr const char* kCsvHeader = "workload,N,B,M,op,count,total_ios,mean_ios,bound";

inline std::vector<ReportRow> rows_of(const ReplayReport& rep, const std::string& workload, std::uint64_t n,
                                      const LazyConfig& cfg) {
    std::vector<ReportRow> rows;
    for (std::size_t k = 0; k < kTraceKinds; ++k) {
        const OpTotals& t = rep.per_op[k];
        if (t.count == 0) continue;
        rows.push_back({workload, n, cfg.block_size, cfg.memory, op_name(static_cast<TraceKind>(k)), t.count,
                        t.total(), static_cast<double>(t.total()) / static_cast<double>(t.count), t.bound});
    }
    return rows;
}

/// Runs the workload at each size and reports per-op I/O totals.
/// Answers are still checked against the oracle; deep checks run once at
/// the end.
inline std::vector<ReportRow> run_scaling(WorkloadKind kind, const std::vector<std::uint64_t>& sizes,
                                          const LazyConfig& cfg, std::uint64_t seed,
                                          std::optional<std::uint64_t> q = std::nullopt, bool oracle = true) {
    std::vector<ReportRow> rows;
    for (std::uint64_t n : sizes) {
        const auto ops = gen_workload(kind, n, q, seed);
        ReplayOptions opt;
        opt.config = cfg;
        opt.check_stride = 0;
        opt.oracle = oracle;
        const ReplayReport rep = replay_and_compare(ops, opt);
        if (!rep.ok) throw CorruptionError(std::string(to_string(kind)) + " at N=" + std::to_string(n) + ": " + rep.failure);
        auto r = rows_of(rep, to_string(kind), n, cfg);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    return rows;
}

inline void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        std::ostringstream mean, bound;
        mean.precision(17);
        bound.precision(17);
        mean << r.mean_ios;
        bound << r.bound;
        out << r.workload << ',' << r.n << ',' << r.b << ',' << r.m << ',' << r.op << ',' << r.count << ','
            << r.total_ios << ',' << mean.str() << ',' << bound.str() << '\n';
    }
}

inline std::vector<ReportRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw TraceError("CSV header missing or wrong");
    std::vector<ReportRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 9) throw TraceError("CSV row with " + std::to_string(f.size()) + " fields");
        try {
            rows.push_back({f[0], std::stoull(f[1]), std::stoull(f[2]), std::stoull(f[3]), f[4], std::stoull(f[5]),
                            std::stoull(f[6]), std::stod(f[7]), std::stod(f[8])});
        } catch (const std::logic_error&) {
            throw TraceError("bad CSV row '" + line + "'");
        }
    }
    return rows;
}

} // namespace lazybtree::harness
