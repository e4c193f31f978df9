#pragma once

// Closed-form constants of Bohnenblust-Hille type inequalities and the
// subexponential envelope scan built on top of them.

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace bhl {

/// Named bound with its multiplicative breakdown; `value` is always the
/// product of the factor values.
struct BoundReport {
    std::string name;
    std::vector<std::pair<std::string, double>> parameters;
    std::vector<std::pair<std::string, double>> factors;
    double value = 1.0;

    void add_factor(std::string label, double v);
    double parameter(const std::string& key) const;
};

inline constexpr double kEulerGamma = 0.5772156649015329;

double log_gamma(double x);

/// Exponent q m r / (q + (m - 1) r) of the lattice-valued inequalities.
double rho(int m, double r, double q = 2.0);

/// s_k = 2 k r / (2 + (k - 1) r); equal to rho(k, r, 2).
double s_k(int k, double r);

/// Upper estimate for the multilinear constant C_{m,t}:
///   prod_{j=2}^m Gamma(2 - (2-t)/(jt - 2t + 2))^{(t(j-2)+2)/(2t - 2jt)}.
double bh_multilinear_constant(int m, double t);
double log_bh_multilinear_constant(int m, double t);

/// (1 + 1/m)^{m-1} sqrt(m) sqrt(2)^{m-1}.
double hypercontractive_bound(int m);

/// m^m / (m-k)^{m-k} * sqrt((m-k)! / m!), with 0^0 = 1.
double C_mk(int m, int k);
double log_C_mk(int m, int k);

/// (m-k)! m^m / ((m-k)^{m-k} m!): the polarization loss when k arguments of
/// the symmetric form are left free.
double harris_factor(int m, int k);

/// Scalar polynomial bound for a fixed split point k in [1, m-1]:
///   (1 + 1/k)^{(m-k)/2} * C_mk(m, k) * C_{k,1}.
BoundReport scalar_bh_bound(int m, int k);
double log_scalar_bh_bound(int m, int k);

struct BestScalarBound {
    int k = 1;
    BoundReport report;
};

/// Minimizes scalar_bh_bound over k in [1, m-1]; ties go to the smaller k.
BestScalarBound scalar_bh_best(int m);
/// Same minimization in log space; returns (k*, log value). Safe for large m.
std::pair<int, double> log_scalar_bh_best(int m);

/// Upper bound for the Kahane constant K_{p,2}, p in [1, 2].
using KahaneProvider = std::function<double(double)>;

/// sqrt(2) on [1, 2) and 1 at p = 2.
KahaneProvider default_kahane_provider();

/// Range-checked call into a provider (defaults to default_kahane_provider()).
double kahane_constant_upper(double p, const KahaneProvider& provider = {});

/// How the k-linear step of the vector-valued bound is estimated.
enum class MultilinearRoute {
    /// C_2(X)^{k-1} prod_{j<k} K_{s_j,2}: valid for any 2-convex, 2-concave target.
    lattice,
    /// C_{k,r}: the target is one-dimensional so the step is a scalar form.
    scalar_target,
};

struct VectorBoundInputs {
    int m = 1;
    int k = 1;
    double r = 1.0;
    double M2 = 1.0;        // 2-concavity constant of X
    double C2X = 1.0;       // cotype 2 constant of X
    double pi_r1 = 1.0;     // (r,1)-summing norm of v, or an upper bound of it
    KahaneProvider kahane;  // empty selects the default provider
    MultilinearRoute route = MultilinearRoute::lattice;
};

/// (2/s_k)^{(m-k)/2} C2X^{k-1} prod_{j=1}^{k-1} K_{s_j,2} C_mk(m,k) M2 pi_r1.
BoundReport vector_bound_2convex(const VectorBoundInputs& in);

/// (2/s_k)^{(m-k)/2} C_mk(m,k) C_{k,r}; the summing-norm factor of v is left
/// to the caller. The summing index 2r(m-1)/(2+(m-2)r) is recorded as the
/// parameter "pi_index".
BoundReport hilbert_lattice_bound(int m, int k, double r);

struct EnvelopeResult {
    double eps = 0.0;
    int m_max = 0;
    double kappa = 0.0;
    double log_kappa = 0.0;
    int argmax_m = 2;
    /// ratio strictly decreasing over the top tenth of [2, m_max]
    bool decreasing_tail = false;
    struct Row {
        int m;
        int k_star;
        double log_bound;
        double log_ratio;
    };
    std::vector<Row> series;
};

/// kappa = max_{2 <= m <= m_max} scalar_bh_best(m) / (1 + eps)^m.
EnvelopeResult subexp_envelope(double eps, int m_max);

/// (gamma - 1)(t - 2) / (2t): growth exponent of C_{m,t} in m.
double asymptotic_exponent(double t);

/// kappa_t * m^{asymptotic_exponent(t)}.
double asymptotic_multilinear_bound(int m, double t, double kappa_t);

/// Least kappa_t for which the asymptotic form dominates C_{m,t} on [1, m_max].
double fit_asymptotic_kappa(double t, int m_max);

}  // namespace bhl
