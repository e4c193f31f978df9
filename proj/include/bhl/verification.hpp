#pragma once

// Executable checks of the inequalities, each returning a structured report,
// and the randomized suites that drive them.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bhl/norms.hpp"
#include "bhl/polynomial.hpp"
#include "bhl/spaces.hpp"

namespace bhl {

enum class CheckStatus { passed, failed, declined };

std::string_view status_name(CheckStatus s);

/// pass <=> lhs <= rhs + tolerance. Declined checks (no sound bound was
/// available) have pass = false and are not failures.
struct CheckReport {
    std::string name;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool pass = false;
    CheckStatus status = CheckStatus::failed;
    double tolerance = 0.0;
    nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();
    /// (file suffix, content) pairs for replaying a failure; empty otherwise.
    std::vector<std::pair<std::string, std::string>> witness;

    /// Sets margin, pass and status from lhs, rhs and tolerance.
    void decide();
    void decline(const std::string& reason);
};

nlohmann::ordered_json to_json(const CheckReport& r);
/// check_name,status,pass,lhs,rhs,margin,tolerance,parameters
std::string csv_header();
std::string to_csv_row(const CheckReport& r);

/// Relative slack of the exact checks.
inline constexpr double kExactTolerance = 1e-9;
/// Standard errors allowed on Monte Carlo checks.
inline constexpr double kSigmaTolerance = 3.0;

struct EnclosureOptions {
    /// ascent starts for the (reporting-only) lower bound
    int budget = 4;
    /// phases per free axis; 0 picks the largest grid within grid_points
    int grid = 0;
    std::uint64_t grid_points = 1u << 16;
    std::uint64_t seed = 1;
};

/// Largest G with G^(free variables of p) <= max_points (at least 1).
int auto_grid(const TorusPolynomial& p, std::uint64_t max_points);

CheckReport check_blei(const MultilinearForm& a, int k, double s, double q);

/// k = 0 selects k* from scalar_bh_best. For m = 1 the constant is 1 and the
/// report also records the phase-alignment equality sum |c_i| = sup |P|.
CheckReport check_scalar_bh(const HomogeneousPolynomial& p, int k, const EnclosureOptions& options = {});

CheckReport check_hypercontractive(const HomogeneousPolynomial& p, double lp, double lq, std::uint64_t samples,
                                   std::uint64_t seed);

CheckReport check_coeff_lemma(const HomogeneousPolynomial& p, const AtomicFunctionSpace& x, double lp, double lq,
                              std::uint64_t samples, std::uint64_t seed);

/// P has coefficients in v.source(); v.target() must be a q = 2 model.
/// pi_upper overrides the automatic summing-norm bound.
CheckReport check_vector_bh(const HomogeneousPolynomial& p, const LinearOperator& v, double r, int k,
                            const EnclosureOptions& options = {}, std::optional<double> pi_upper = std::nullopt);

/// T has values in v.source(), which must be an l_1 model.
CheckReport check_multilinear_gt(const MultilinearForm& t, const LinearOperator& v, double r,
                                 const EnclosureOptions& options = {});

CheckReport check_hilbert_lattice(const HomogeneousPolynomial& p, const LinearOperator& v, double r, int k,
                                  const EnclosureOptions& options = {});

CheckReport kahane_empirical(const AtomicFunctionSpace& space, const std::vector<CVector>& xs, double p,
                             std::uint64_t trials, std::uint64_t seed);

struct SearchResult {
    int m = 1;
    int n = 1;
    double best_ratio = 0.0;
    /// scalar_bh_best(m), or 1 for m = 1
    double upper = 1.0;
    double gap = 0.0;
    bool consistent = true;
    std::uint64_t evaluations = 0;
    HomogeneousPolynomial witness{1, 1};
};

/// Random restarts plus coordinatewise perturbation ascent on
/// ||c||_{2m/(m+1)} / supnorm_upper(P). Restart j begins at evaluation
/// j * kSearchRestartPeriod with its own substream, so the best ratio is
/// nondecreasing in budget.
inline constexpr int kSearchRestartPeriod = 64;
SearchResult lower_bound_search(int m, int n, int budget, std::uint64_t seed, std::uint64_t grid_points = 4096);

struct SuiteConfig {
    std::uint64_t seed = 1;
    /// 0 selects the suite default
    int trials = 0;
    std::uint64_t samples = 20000;
    std::uint64_t grid_points = 1u << 16;
    /// phases per free axis for sup-norm enclosures; 0 = derived from grid_points
    int grid = 0;
    int budget = 4;
    int workers = 0;  // 0 = hardware concurrency
};

const std::vector<std::string>& suite_names();
int default_trials(std::string_view suite);

/// Runs the randomized sweep of one suite; results are ordered by instance
/// index and reproducible from the config. Throws std::invalid_argument for
/// an unknown suite.
std::vector<CheckReport> run_suite(std::string_view suite, const SuiteConfig& config);

}  // namespace bhl
