#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lazybtree::harness {

class TraceError : public std::runtime_error {
public:
    explicit TraceError(const std::string& what) : std::runtime_error(what) {}
};

enum class TraceKind : std::uint8_t {
    insert,        // i <key>
    erase,         // d <ref>
    change_key,    // c <ref> <key>
    query_element, // qe <key>
    query_rank,    // qr <rank>
    pq_minimum,    // pm
    pq_delete_min, // pd
    pq_decrease,   // pk <ref> <key>
};

inline constexpr std::size_t kTraceKinds = 8;

/// One trace line. Refs are 0-based indices of earlier inserts.
struct TraceOp {
    TraceKind kind = TraceKind::insert;
    std::uint64_t a = 0; ///< key, ref or rank
    std::uint64_t b = 0; ///< new key for c / pk

    friend bool operator==(const TraceOp&, const TraceOp&) = default;

    static TraceOp insert(std::uint64_t key) { return {TraceKind::insert, key, 0}; }
    static TraceOp erase(std::uint64_t ref) { return {TraceKind::erase, ref, 0}; }
    static TraceOp change(std::uint64_t ref, std::uint64_t key) { return {TraceKind::change_key, ref, key}; }
    static TraceOp query_element(std::uint64_t key) { return {TraceKind::query_element, key, 0}; }
    static TraceOp query_rank(std::uint64_t r) { return {TraceKind::query_rank, r, 0}; }
    static TraceOp pq_minimum() { return {TraceKind::pq_minimum, 0, 0}; }
    static TraceOp pq_delete_min() { return {TraceKind::pq_delete_min, 0, 0}; }
    static TraceOp pq_decrease(std::uint64_t ref, std::uint64_t key) { return {TraceKind::pq_decrease, ref, key}; }
};

inline const char* op_name(TraceKind k) {
    switch (k) {
    case TraceKind::insert: return "insert";
    case TraceKind::erase: return "delete";
    case TraceKind::change_key: return "change_key";
    case TraceKind::query_element: return "query_element";
    case TraceKind::query_rank: return "query_rank";
    case TraceKind::pq_minimum: return "pq_minimum";
    case TraceKind::pq_delete_min: return "pq_delete_min";
    case TraceKind::pq_decrease: return "pq_decrease_key";
    }
    return "?";
}

inline bool is_pq_op(TraceKind k) {
    return k == TraceKind::pq_minimum || k == TraceKind::pq_delete_min || k == TraceKind::pq_decrease;
}

inline std::string to_line(const TraceOp& op) {
    switch (op.kind) {
    case TraceKind::insert: return "i " + std::to_string(op.a);
    case TraceKind::erase: return "d " + std::to_string(op.a);
    case TraceKind::change_key: return "c " + std::to_string(op.a) + " " + std::to_string(op.b);
    case TraceKind::query_element: return "qe " + std::to_string(op.a);
    case TraceKind::query_rank: return "qr " + std::to_string(op.a);
    case TraceKind::pq_minimum: return "pm";
    case TraceKind::pq_delete_min: return "pd";
    case TraceKind::pq_decrease: return "pk " + std::to_string(op.a) + " " + std::to_string(op.b);
    }
    return {};
}

namespace detail {

inline std::vector<std::string_view> words(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline std::uint64_t number(std::string_view w, std::string_view line) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc{} || p != w.data() + w.size())
        throw TraceError("bad number '" + std::string(w) + "' in trace line '" + std::string(line) + "'");
    return v;
}

} // namespace detail

inline TraceOp parse_line(std::string_view line) {
    const auto w = detail::words(line);
    if (w.empty()) throw TraceError("empty trace line");
    auto want = [&](std::size_t n) {
        if (w.size() != n + 1) throw TraceError("wrong operand count in trace line '" + std::string(line) + "'");
    };
    auto num = [&](std::size_t i) { return detail::number(w[i], line); };
    const std::string_view t = w[0];
    if (t == "i") return want(1), TraceOp::insert(num(1));
    if (t == "d") return want(1), TraceOp::erase(num(1));
    if (t == "c") return want(2), TraceOp::change(num(1), num(2));
    if (t == "qe") return want(1), TraceOp::query_element(num(1));
    if (t == "qr") return want(1), TraceOp::query_rank(num(1));
    if (t == "pm") return want(0), TraceOp::pq_minimum();
    if (t == "pd") return want(0), TraceOp::pq_delete_min();
    if (t == "pk") return want(2), TraceOp::pq_decrease(num(1), num(2));
    throw TraceError("unknown trace op '" + std::string(t) + "'");
}

/// Blank lines and lines starting with '#' are skipped.
inline std::vector<TraceOp> read_trace(std::istream& in) {
    std::vector<TraceOp> ops;
    std::string line;
    while (std::getline(in, line)) {
        const auto w = detail::words(line);
        if (w.empty() || w[0].front() == '#') continue;
        ops.push_back(parse_line(line));
    }
    return ops;
}

inline void write_trace(std::ostream& out, std::span<const TraceOp> ops) {
    for (const auto& op : ops) out << to_line(op) << '\n';
}

} // namespace lazybtree::harness
