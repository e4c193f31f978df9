#pragma once

// Norms of polynomials: coefficient l_p norms, mixed (Blei) norms, certified
// sup-norm enclosures on the torus and Monte Carlo torus L^p norms.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bhl/combinatorics.hpp"
#include "bhl/polynomial.hpp"
#include "bhl/spaces.hpp"

namespace bhl {

/// Optional target space for vector coefficients; empty means the modulus of
/// a scalar (coeff_dim must then be 1).
using Target = std::optional<AtomicFunctionSpace>;

double value_norm(std::span<const cplx> value, const Target& target);

/// (sum x_i^p)^{1/p} of nonnegative values; p = 1 is a plain ordered sum and
/// p = +infinity the max.
double lp_norm(std::span<const double> x, double p);

struct Enclosure {
    double lower = 0.0;
    double upper = 0.0;
    std::string method;
    std::uint64_t budget = 0;

    double width() const noexcept { return upper - lower; }
};

/// (sum_alpha ||c_alpha||^p)^{1/p}; p = +infinity gives the max.
double coeff_lp_norm(const HomogeneousPolynomial& p, double exponent, const Target& target = std::nullopt);

/// (sum_{i_S} (sum_{i_S^} |a_i|^q)^{s/q})^{1/s} for a scalar array over M(m, n).
double mixed_norm(const MultilinearForm& a, const SubsetPair& pair, double s, double q);

/// l_p norm of a scalar array over all of M(m, n).
double array_lp_norm(const MultilinearForm& a, double p);

/// Trigonometric polynomial sum_t c_t prod_v z_v^{e_tv} on a torus of
/// `variables` coordinates, with groups of variables under which it is
/// homogeneous (so a common rotation of a group leaves every norm unchanged).
struct TorusPolynomial {
    int variables = 0;
    int coeff_dim = 1;
    std::vector<std::vector<std::pair<int, int>>> monomials;  // (variable, exponent) per term
    CVector coefficients;                                      // term-major, coeff_dim per term
    std::vector<std::vector<int>> homogeneous_groups;

    static TorusPolynomial from(const HomogeneousPolynomial& p);
    /// T(w^(1), ..., w^(m)) as a polynomial in the m * n coordinates.
    static TorusPolynomial from(const MultilinearForm& t);

    std::span<const cplx> coefficient(std::size_t term) const;
    CVector evaluate_phases(std::span<const double> theta) const;
};

/// Variables on the phase grid of supnorm_upper: those carrying a nonzero
/// term, minus one pinned variable per homogeneous group.
std::vector<int> free_axes(const TorusPolynomial& p);

/// Cap on grid points for sup-norm enclosures.
inline constexpr std::uint64_t kMaxGridPoints = 100'000'000;

struct SupnormOptions {
    int phase_scan = 1024;
    int max_sweeps = 50;
};

/// Largest ||P(z)|| found by coordinatewise phase ascent from `budget`
/// starting points (the first is z = (1, ..., 1)). Every value is an actual
/// evaluation, so the result is a lower bound for the sup norm.
double supnorm_lower(const TorusPolynomial& p, int budget, std::uint64_t seed, const Target& target,
                     const SupnormOptions& options = {});
double supnorm_lower(const HomogeneousPolynomial& p, int budget, std::uint64_t seed, const Target& target = std::nullopt);

/// min(sum ||c||, grid max + Lipschitz inflation) with one coordinate per
/// homogeneous group pinned to phase 0. Always >= the true sup norm.
double supnorm_upper(const TorusPolynomial& p, int grid_per_axis, const Target& target);
double supnorm_upper(const HomogeneousPolynomial& p, int grid_per_axis, const Target& target = std::nullopt);

Enclosure supnorm_enclosure(const HomogeneousPolynomial& p, int budget, int grid_per_axis, std::uint64_t seed,
                            const Target& target = std::nullopt);

struct SamplingOptions {
    int shards = 1;
    /// Latin-hypercube phases per shard instead of i.i.d. uniform ones.
    bool stratified = false;
};

struct MonteCarloEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    /// mean of ||P||^p and its standard error
    double moment = 0.0;
    double moment_std_error = 0.0;
    std::uint64_t samples = 0;
};

/// (E ||P(z)||^p)^{1/p} under the uniform measure on the torus, with a
/// delta-method standard error. Reproducible from (seed, shards).
MonteCarloEstimate torus_lp_norm(const HomogeneousPolynomial& p, double exponent, std::uint64_t samples,
                                 std::uint64_t seed, const Target& target = std::nullopt,
                                 const SamplingOptions& options = {});

/// Exact L^2 norm via orthonormality of monomials; for vector coefficients the
/// target norm of the atomwise aggregate (sum_alpha |c_alpha,j|^2)^{1/2}.
double exact_l2_torus(const HomogeneousPolynomial& p, const Target& target = std::nullopt);

}  // namespace bhl
