#pragma once

// Finite atomic models of Banach function spaces: weighted l_q on d atoms,
// linear operators between them, and summing-norm estimates.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bhl {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// ||f|| = (sum_j mu_j |f_j|^q)^{1/q} on d atoms with measures mu_j > 0.
class AtomicFunctionSpace {
public:
    AtomicFunctionSpace(std::vector<double> weights, double exponent);

    /// d atoms of unit measure.
    static AtomicFunctionSpace uniform(int atoms, double exponent);
    /// C as a one-atom Hilbert model.
    static AtomicFunctionSpace scalar() { return uniform(1, 2.0); }

    int atoms() const noexcept { return static_cast<int>(weights_.size()); }
    double exponent() const noexcept { return exponent_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    bool is_hilbert() const noexcept { return exponent_ == 2.0; }

    double norm(std::span<const cplx> f) const;
    /// Norm of the functional phi(x) = sum_j phi_j x_j on this space.
    double dual_norm(std::span<const cplx> phi) const;

    friend bool operator==(const AtomicFunctionSpace&, const AtomicFunctionSpace&) = default;

private:
    std::vector<double> weights_;
    double exponent_;
};

/// The p-th power X_[p]: ||f||_[p] = || |f|^{1/p} ||^p, again a weighted l_{q/p}.
AtomicFunctionSpace pth_power_space(const AtomicFunctionSpace& space, double p);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Lattice constants of a weighted l_q model. Closed forms are returned where
/// they are known; other arguments give std::nullopt.
struct LatticeConstants {
    double exponent = 2.0;
    int atoms = 1;
    /// M_{q'}(X): 1 for q' >= q.
    std::optional<double> concavity(double q_prime) const;
    /// M^{p}(X): 1 for p <= q.
    std::optional<double> convexity(double p) const;
    /// Cotype 2 constant: exact (lower == upper == 1) for Hilbert models,
    /// otherwise a documented upper bound and a sampled lower bound.
    Interval cotype2;
};

/// `trials` random vector families (plus structured sign patterns) drive the
/// cotype lower bound; sign averages are enumerated exactly.
LatticeConstants lattice_constants(const AtomicFunctionSpace& space, int trials = 200, std::uint64_t seed = 1);

/// Matrix of shape target.atoms x source.atoms, row-major.
class LinearOperator {
public:
    LinearOperator(AtomicFunctionSpace source, AtomicFunctionSpace target, CVector matrix);

    static LinearOperator identity(const AtomicFunctionSpace& space);
    static LinearOperator zero(AtomicFunctionSpace source, AtomicFunctionSpace target);

    const AtomicFunctionSpace& source() const noexcept { return source_; }
    const AtomicFunctionSpace& target() const noexcept { return target_; }
    int rows() const noexcept { return target_.atoms(); }
    int cols() const noexcept { return source_.atoms(); }
    cplx at(int row, int col) const { return matrix_[static_cast<std::size_t>(row * cols() + col)]; }
    const CVector& matrix() const noexcept { return matrix_; }

    CVector apply(std::span<const cplx> x) const;
    CVector column(int col) const;

private:
    AtomicFunctionSpace source_;
    AtomicFunctionSpace target_;
    CVector matrix_;
};

enum class NormCertificate {
    exact_column_max,    // l_1-type source: extreme points are scaled basis vectors
    singular_value,      // Hilbert source and target: largest singular value
    lower_estimate,      // multistart search only; value is a lower bound
};

struct OperatorNorm {
    double value = 0.0;
    NormCertificate certificate = NormCertificate::lower_estimate;
    bool certified() const noexcept { return certificate != NormCertificate::lower_estimate; }
};

std::string_view certificate_name(NormCertificate c);

OperatorNorm operator_norm(const LinearOperator& v, int multistarts = 64, std::uint64_t seed = 7);

struct WeakNormOptions {
    int multistarts = 64;
    int ascent_rounds = 50;
    /// phases per sequence element for the grid enclosure
    int grid_phases = 16;
    /// skip the grid enclosure beyond this many evaluations
    std::uint64_t grid_budget = 1u << 16;
    std::uint64_t seed = 11;
};

/// sup_{||phi|| <= 1} sum_i |phi(x_i)| = sup over unimodular theta of
/// ||sum_i theta_i x_i||. Lower bound by alternating phase alignment from
/// multiple starts, upper bound by the triangle inequality and, when small
/// enough, a phase-grid enclosure.
Interval weak_ell1_norm(const AtomicFunctionSpace& space, std::span<const CVector> xs,
                        const WeakNormOptions& options = {});

struct SummingEstimate {
    double r = 1.0;
    double lower = 0.0;
    std::optional<double> upper;
    std::vector<CVector> witness;
};

/// Lower bound for pi_{(r,1)}(v): the best of (sum ||v x_i||^r)^{1/r} over the
/// weak l_1 upper bound of (x_i), across sampled sequences. Trial t draws its
/// sequence from substream (seed, t) and every prefix of length <= cap is
/// scored, so the bound is nondecreasing in both trials and cap.
SummingEstimate summing_norm_lower(const LinearOperator& v, double r, int seq_len_cap, int trials,
                                   std::uint64_t seed);

/// Upper bound for the complex Grothendieck constant.
inline constexpr double kComplexGrothendieckUpper = 1.40491;

/// K_G * ||v|| for v from an l_1 model into a Hilbert model; bounds pi_p(v)
/// for every p >= 1, hence also pi_{(r,1)}(v).
double grothendieck_upper(const LinearOperator& v, double grothendieck_constant = kComplexGrothendieckUpper);

/// Operator file: {"source": {...}, "target": {...}, "matrix": [[[re, im], ...], ...]}.
std::string serialize(const LinearOperator& v);
LinearOperator parse_operator(std::string_view text);

}  // namespace bhl
