#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace lazybtree {

using Key = std::uint64_t;
using ElemId = std::uint64_t;
using GapId = std::uint64_t;

/// A stored element. Keys may repeat; the id makes every element distinct, so
/// (key, id) is a strict total order and every gap/interval boundary is a
/// point of that order.
struct Element {
    Key key = 0;
    ElemId id = 0;

    friend constexpr auto operator<=>(const Element&, const Element&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Element& e) {
    return os << '(' << e.key << ',' << e.id << ')';
}

/// Lowest point of the element order. Inclusive lower bound of the first gap.
inline constexpr Element kBottom{0, 0};

/// Exclusive upper bound of the last gap. Never a real element: ids stay
/// below kMaxElemId.
inline constexpr Element kTop{std::numeric_limits<Key>::max(),
                              std::numeric_limits<ElemId>::max()};

inline constexpr ElemId kMaxElemId = std::numeric_limits<ElemId>::max() - 2;

/// Smallest point strictly greater than e.
constexpr Element successor(const Element& e) {
    if (e.id == std::numeric_limits<ElemId>::max())
        return Element{e.key + 1, 0};
    return Element{e.key, e.id + 1};
}

/// Largest point strictly smaller than e (e must be above kBottom).
constexpr Element predecessor(const Element& e) {
    if (e.id == 0) return Element{e.key - 1, std::numeric_limits<ElemId>::max()};
    return Element{e.key, e.id - 1};
}

/// Largest point that is <= every element with key <= k. Elements with key k
/// all compare below it because ids never reach kMaxElemId + 1.
constexpr Element key_probe(Key k) { return Element{k, kMaxElemId + 1}; }

//! Internal consistency failure; indicates a bug, never expected.
class CorruptionError : public std::logic_error {
public:
    explicit CorruptionError(const std::string& what) : std::logic_error(what) {}
};

class NotFoundError : public std::out_of_range {
public:
    explicit NotFoundError(const std::string& what) : std::out_of_range(what) {}
};

class RankError : public std::out_of_range {
public:
    explicit RankError(const std::string& what) : std::out_of_range(what) {}
};

class ContractError : public std::invalid_argument {
public:
    explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

class NoPredecessorError : public std::out_of_range {
public:
    explicit NoPredecessorError(const std::string& what) : std::out_of_range(what) {}
};

class EmptyError : public std::out_of_range {
public:
    explicit EmptyError(const std::string& what) : std::out_of_range(what) {}
};

/// How many sides of a gap have been query boundaries.
enum class Sidedness : std::uint8_t { zero, one_left, one_right, two };

inline const char* to_string(Sidedness s) {
    switch (s) {
    case Sidedness::zero: return "zero";
    case Sidedness::one_left: return "one_left";
    case Sidedness::one_right: return "one_right";
    case Sidedness::two: return "two";
    }
    return "?";
}

/// Sidedness of the (left, right) gaps produced by splitting a gap.
struct SplitSidedness {
    Sidedness left;
    Sidedness right;
};

constexpr SplitSidedness split_sidedness(Sidedness s) {
    switch (s) {
    case Sidedness::zero: return {Sidedness::one_right, Sidedness::one_left};
    case Sidedness::one_left: return {Sidedness::two, Sidedness::one_left};
    case Sidedness::one_right: return {Sidedness::one_right, Sidedness::two};
    case Sidedness::two: break;
    }
    return {Sidedness::two, Sidedness::two};
}

} // namespace lazybtree
