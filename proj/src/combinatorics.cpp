#include "bhl/combinatorics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bhl {

namespace {

void require_sizes(int m, int n) {
    if (m < 1) throw std::invalid_argument("degree m must be >= 1, got " + std::to_string(m));
    if (n < 1) throw std::invalid_argument("dimension n must be >= 1, got " + std::to_string(n));
}

}  // namespace

IndexTuple::IndexTuple(std::vector<int> e, int dim) : entries(std::move(e)), n(dim) {
    if (entries.empty()) throw std::invalid_argument("index tuple must have at least one entry");
    if (n < 1) throw std::invalid_argument("index tuple dimension must be >= 1");
    for (int v : entries) {
        if (v < 0 || v >= n) {
            throw std::out_of_range("index tuple entry " + std::to_string(v) + " outside [0, " +
                                    std::to_string(n) + ")");
        }
    }
}

IndexTuple IndexTuple::canonical() const {
    IndexTuple out = *this;
    std::sort(out.entries.begin(), out.entries.end());
    return out;
}

bool IndexTuple::is_canonical() const noexcept {
    return std::is_sorted(entries.begin(), entries.end());
}

MultiIndex::MultiIndex(std::vector<int> e) : exponents(std::move(e)) {
    if (exponents.empty()) throw std::invalid_argument("multi-index must have dimension >= 1");
    for (int v : exponents) {
        if (v < 0) throw std::invalid_argument("multi-index exponents must be nonnegative");
    }
}

int MultiIndex::degree() const noexcept {
    return std::accumulate(exponents.begin(), exponents.end(), 0);
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (int j = 1; j <= k; ++j) {
        // result * (n - k + j) / j stays integral at every step.
        const std::uint64_t num = static_cast<std::uint64_t>(n - k + j);
        const std::uint64_t g = std::gcd(result, static_cast<std::uint64_t>(j));
        const std::uint64_t r = result / g;
        const std::uint64_t d = static_cast<std::uint64_t>(j) / g;
        if (r > std::numeric_limits<std::uint64_t>::max() / num) {
            throw std::overflow_error("binomial coefficient overflows 64 bits");
        }
        result = r * (num / d);
    }
    return result;
}

std::uint64_t count_J(int m, int n) {
    require_sizes(m, n);
    return binomial(n + m - 1, m);
}

std::uint64_t checked_power(int n, int m) {
    std::uint64_t out = 1;
    for (int j = 0; j < m; ++j) {
        if (out > (std::uint64_t{1} << 63) / static_cast<std::uint64_t>(n)) {
            throw std::overflow_error("n^m overflows");
        }
        out *= static_cast<std::uint64_t>(n);
    }
    return out;
}

std::vector<IndexTuple> enumerate_J(int m, int n) {
    require_sizes(m, n);
    std::vector<IndexTuple> out;
    out.reserve(static_cast<std::size_t>(count_J(m, n)));
    std::vector<int> cur(static_cast<std::size_t>(m), 0);
    while (true) {
        IndexTuple t;
        t.entries = cur;
        t.n = n;
        out.push_back(std::move(t));
        int pos = m - 1;
        while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == n - 1) --pos;
        if (pos < 0) break;
        const int next = cur[static_cast<std::size_t>(pos)] + 1;
        for (int p = pos; p < m; ++p) cur[static_cast<std::size_t>(p)] = next;
    }
    return out;
}

std::size_t rank_J(const IndexTuple& i) {
    if (!i.is_canonical()) throw std::invalid_argument("rank_J expects a nondecreasing tuple");
    const int m = i.degree();
    const int n = i.n;
    std::uint64_t rank = 0;
    int prev = 0;
    for (int p = 0; p < m; ++p) {
        const int rest = m - p - 1;
        for (int v = prev; v < i.entries[static_cast<std::size_t>(p)]; ++v) {
            // nondecreasing tails of length `rest` with values in [v, n)
            rank += rest == 0 ? 1 : binomial(n - v + rest - 1, rest);
        }
        prev = i.entries[static_cast<std::size_t>(p)];
    }
    return static_cast<std::size_t>(rank);
}

std::uint64_t multiplicity(const MultiIndex& alpha) {
    // Iterative multinomial: prod_j binomial(m_1 + ... + m_j, m_j).
    std::uint64_t out = 1;
    int running = 0;
    for (int e : alpha.exponents) {
        running += e;
        const std::uint64_t b = binomial(running, e);
        if (b != 0 && out > std::numeric_limits<std::uint64_t>::max() / b) {
            throw std::overflow_error("multiplicity overflows 64 bits");
        }
        out *= b;
    }
    return out;
}

std::uint64_t multiplicity(const IndexTuple& i) { return multiplicity(alpha_of(i)); }

MultiIndex alpha_of(const IndexTuple& i) {
    if (i.n < 1) throw std::invalid_argument("alpha_of: tuple has no dimension");
    std::vector<int> e(static_cast<std::size_t>(i.n), 0);
    for (int v : i.entries) {
        if (v < 0 || v >= i.n) throw std::out_of_range("alpha_of: entry outside [0, n)");
        ++e[static_cast<std::size_t>(v)];
    }
    MultiIndex out;
    out.exponents = std::move(e);
    return out;
}

IndexTuple tuple_of(const MultiIndex& alpha) {
    if (alpha.degree() < 1) throw std::invalid_argument("tuple_of: multi-index of degree 0");
    IndexTuple out;
    out.n = alpha.dimension();
    for (int j = 0; j < alpha.dimension(); ++j) {
        for (int c = 0; c < alpha.exponents[static_cast<std::size_t>(j)]; ++c) out.entries.push_back(j);
    }
    return out;
}

std::vector<SubsetPair> enumerate_subsets(int m, int k) {
    if (m < 1) throw std::invalid_argument("enumerate_subsets: m must be >= 1");
    if (k < 1 || k > m) {
        throw std::out_of_range("enumerate_subsets: k=" + std::to_string(k) + " outside [1, " +
                                std::to_string(m) + "]");
    }
    std::vector<SubsetPair> out;
    std::vector<int> s(static_cast<std::size_t>(k));
    std::iota(s.begin(), s.end(), 0);
    while (true) {
        SubsetPair pair;
        pair.universe = m;
        pair.subset = s;
        for (int p = 0, c = 0; p < m; ++p) {
            if (c < k && s[static_cast<std::size_t>(c)] == p) {
                ++c;
            } else {
                pair.complement.push_back(p);
            }
        }
        out.push_back(std::move(pair));
        int pos = k - 1;
        while (pos >= 0 && s[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
        if (pos < 0) break;
        ++s[static_cast<std::size_t>(pos)];
        for (int p = pos + 1; p < k; ++p) s[static_cast<std::size_t>(p)] = s[static_cast<std::size_t>(p - 1)] + 1;
    }
    return out;
}

std::pair<IndexTuple, IndexTuple> split(const IndexTuple& i, const SubsetPair& pair) {
    if (i.degree() != pair.universe) {
        throw std::invalid_argument("split: tuple degree " + std::to_string(i.degree()) +
                                    " does not match subset universe " + std::to_string(pair.universe));
    }
    IndexTuple head;
    IndexTuple tail;
    head.n = tail.n = i.n;
    for (int p : pair.subset) head.entries.push_back(i.entries[static_cast<std::size_t>(p)]);
    for (int p : pair.complement) tail.entries.push_back(i.entries[static_cast<std::size_t>(p)]);
    return {std::move(head), std::move(tail)};
}

void for_each_M(int m, int n, const std::function<void(std::span<const int>, std::size_t)>& visit) {
    require_sizes(m, n);
    const std::uint64_t total = checked_power(n, m);
    std::vector<int> cur(static_cast<std::size_t>(m), 0);
    for (std::uint64_t flat = 0; flat < total; ++flat) {
        visit(cur, static_cast<std::size_t>(flat));
        for (int p = m - 1; p >= 0; --p) {
            if (++cur[static_cast<std::size_t>(p)] < n) break;
            cur[static_cast<std::size_t>(p)] = 0;
        }
    }
}

}  // namespace bhl
