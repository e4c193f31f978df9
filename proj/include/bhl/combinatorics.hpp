#pragma once

// Multi-index machinery for m-homogeneous polynomials on C^n.
//
// Coordinates are 0-based throughout: an index tuple of degree m over n
// variables holds m entries in [0, n). Positions inside a tuple (the
// universe {0, ..., m-1} that subsets are drawn from) are 0-based as well.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bhl {

/// Ordered tuple i = (i_1, ..., i_m) with entries in [0, n).
struct IndexTuple {
    std::vector<int> entries;
    int n = 0;

    IndexTuple() = default;
    IndexTuple(std::vector<int> e, int dim);

    int degree() const noexcept { return static_cast<int>(entries.size()); }
    IndexTuple canonical() const;
    bool is_canonical() const noexcept;

    friend bool operator==(const IndexTuple&, const IndexTuple&) = default;
};

/// Exponent vector alpha with |alpha| = degree.
struct MultiIndex {
    std::vector<int> exponents;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> e);

    int dimension() const noexcept { return static_cast<int>(exponents.size()); }
    int degree() const noexcept;

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// A k-subset S of the tuple positions {0, ..., m-1} and its complement.
struct SubsetPair {
    std::vector<int> subset;
    std::vector<int> complement;
    int universe = 0;
};

/// All nondecreasing tuples of J(m, n) in lexicographic order.
std::vector<IndexTuple> enumerate_J(int m, int n);

/// Number of elements of J(m, n), i.e. binomial(n + m - 1, m).
std::uint64_t count_J(int m, int n);

/// Position of a canonical tuple inside enumerate_J(m, n).
std::size_t rank_J(const IndexTuple& i);

/// Number of distinct rearrangements of i: m! / (m_1! ... m_n!).
std::uint64_t multiplicity(const IndexTuple& i);
std::uint64_t multiplicity(const MultiIndex& alpha);

MultiIndex alpha_of(const IndexTuple& i);
IndexTuple tuple_of(const MultiIndex& alpha);

/// The binomial(m, k) pairs (S, S^) with |S| = k, S in lexicographic order.
std::vector<SubsetPair> enumerate_subsets(int m, int k);

/// (i_S, i_S^): entries of i at the positions of S and of its complement.
std::pair<IndexTuple, IndexTuple> split(const IndexTuple& i, const SubsetPair& pair);

std::uint64_t binomial(int n, int k);

/// n^m with an overflow check; throws std::overflow_error past 2^63.
std::uint64_t checked_power(int n, int m);

/// Visits every tuple of M(m, n) in lexicographic order (odometer with the
/// last position fastest). The visitor receives the flat row-major offset.
void for_each_M(int m, int n, const std::function<void(std::span<const int>, std::size_t)>& visit);

}  // namespace bhl
