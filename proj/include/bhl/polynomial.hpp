#pragma once

// m-homogeneous polynomials P(z) = sum_{|alpha| = m} c_alpha z^alpha on C^n
// with scalar (coeff_dim = 1) or vector coefficients, and their symmetric
// m-linear forms.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bhl/combinatorics.hpp"

namespace bhl {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// Shared, immutable index set J(m, n) with the exponent vector of each entry.
class TermIndex {
public:
    TermIndex(int m, int n);

    int degree() const noexcept { return m_; }
    int dimension() const noexcept { return n_; }
    std::size_t size() const noexcept { return tuples_.size(); }
    const IndexTuple& tuple(std::size_t pos) const { return tuples_[pos]; }
    const MultiIndex& alpha(std::size_t pos) const { return alphas_[pos]; }
    std::uint64_t multiplicity(std::size_t pos) const { return multiplicities_[pos]; }
    std::size_t position(const MultiIndex& alpha) const;
    std::size_t position(const IndexTuple& i) const { return rank_J(i.canonical()); }

    static std::shared_ptr<const TermIndex> get(int m, int n);

private:
    int m_;
    int n_;
    std::vector<IndexTuple> tuples_;
    std::vector<MultiIndex> alphas_;
    std::vector<std::uint64_t> multiplicities_;
};

/// Coefficients stored densely in enumerate_J(m, n) order; entry `pos`
/// occupies [pos * coeff_dim, (pos + 1) * coeff_dim).
class HomogeneousPolynomial {
public:
    HomogeneousPolynomial(int n, int m, int coeff_dim = 1);
    HomogeneousPolynomial(int n, int m, int coeff_dim, CVector coefficients);

    int dimension() const noexcept { return index_->dimension(); }
    int degree() const noexcept { return index_->degree(); }
    int coeff_dim() const noexcept { return coeff_dim_; }
    std::size_t term_count() const noexcept { return index_->size(); }
    const TermIndex& terms() const noexcept { return *index_; }

    std::span<const cplx> coefficient(std::size_t pos) const;
    std::span<cplx> coefficient(std::size_t pos);
    std::span<const cplx> coefficient(const MultiIndex& alpha) const { return coefficient(index_->position(alpha)); }
    std::span<cplx> coefficient(const MultiIndex& alpha) { return coefficient(index_->position(alpha)); }
    const CVector& raw() const noexcept { return coeffs_; }

    /// Sets the scalar coefficient c_alpha; chains.
    HomogeneousPolynomial& set(const MultiIndex& alpha, cplx value);

    friend bool operator==(const HomogeneousPolynomial& a, const HomogeneousPolynomial& b) {
        return a.dimension() == b.dimension() && a.degree() == b.degree() && a.coeff_dim_ == b.coeff_dim_ &&
               a.coeffs_ == b.coeffs_;
    }

private:
    std::shared_ptr<const TermIndex> index_;
    int coeff_dim_;
    CVector coeffs_;
};

/// Values a_i on J(m, n) of the symmetric m-linear form, extended to M(m, n)
/// by symmetry. Same storage layout as HomogeneousPolynomial.
class SymmetricForm {
public:
    SymmetricForm(int n, int m, int coeff_dim = 1);
    SymmetricForm(int n, int m, int coeff_dim, CVector values);

    int dimension() const noexcept { return index_->dimension(); }
    int degree() const noexcept { return index_->degree(); }
    int coeff_dim() const noexcept { return coeff_dim_; }
    std::size_t term_count() const noexcept { return index_->size(); }
    const TermIndex& terms() const noexcept { return *index_; }

    std::span<const cplx> value(std::size_t pos) const;
    std::span<cplx> value(std::size_t pos);
    /// a_i for an arbitrary (not necessarily sorted) tuple.
    std::span<const cplx> value(const IndexTuple& i) const { return value(index_->position(i)); }
    const CVector& raw() const noexcept { return values_; }

private:
    std::shared_ptr<const TermIndex> index_;
    int coeff_dim_;
    CVector values_;
};

/// Dense array over all of M(m, n) (row-major, last position fastest) with
/// vector entries: a general m-linear map C^n x ... x C^n -> C^coeff_dim given
/// by its values T(e_{i_1}, ..., e_{i_m}). With coeff_dim = 1 it is a plain
/// scalar matrix (a_i).
class MultilinearForm {
public:
    MultilinearForm(int n, int m, int coeff_dim = 1);
    MultilinearForm(int n, int m, int coeff_dim, CVector values);

    static MultilinearForm from_symmetric(const SymmetricForm& form);

    int dimension() const noexcept { return n_; }
    int degree() const noexcept { return m_; }
    int coeff_dim() const noexcept { return coeff_dim_; }
    std::size_t entry_count() const noexcept { return entries_; }

    std::size_t offset(std::span<const int> i) const;
    std::span<const cplx> value(std::size_t flat) const;
    std::span<cplx> value(std::size_t flat);
    std::span<const cplx> value(std::span<const int> i) const { return value(offset(i)); }
    const CVector& raw() const noexcept { return values_; }

private:
    int n_;
    int m_;
    int coeff_dim_;
    std::size_t entries_;
    CVector values_;
};

/// Largest n^m accepted by the M(m, n) expansions.
inline constexpr std::uint64_t kMaxFullExpansion = 10'000'000;

CVector evaluate(const HomogeneousPolynomial& p, std::span<const cplx> z);

SymmetricForm polarize(const HomogeneousPolynomial& p);
HomogeneousPolynomial depolarize(const SymmetricForm& form);

/// sum_{i in M(m,n)} a_i prod_k w[k][i_k]. Cost n^m.
CVector evaluate_form(const SymmetricForm& form, std::span<const CVector> w);

/// k-linear form u -> L(u at the positions of S, fixed at the positions of S^).
SymmetricForm partial_apply(const SymmetricForm& form, const SubsetPair& pair, std::span<const cplx> fixed);

enum class CoefficientLaw { steinhaus, gaussian, unimodular_sparse };

CoefficientLaw parse_law(std::string_view name);
std::string_view law_name(CoefficientLaw law);

/// Steinhaus: independent uniform phases on the unit circle. Gaussian:
/// standard complex normal (E|c|^2 = 1). Unimodular-sparse: each entry is 0
/// or a Steinhaus variable with probability 1/2.
HomogeneousPolynomial random_polynomial(int n, int m, int coeff_dim, CoefficientLaw law, std::uint64_t seed);

/// Sparse JSON text: {"n", "m", "coeff_dim", "coefficients": [{"alpha", "value"}]}.
std::string serialize(const HomogeneousPolynomial& p);
HomogeneousPolynomial parse_polynomial(std::string_view text);

}  // namespace bhl
