#include "bhl/constants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace bhl {

namespace {

void require_k(int m, int k) {
    if (m < 1) throw std::invalid_argument("m must be >= 1, got " + std::to_string(m));
    if (k < 1 || k > m) {
        throw std::out_of_range("k=" + std::to_string(k) + " outside [1, " + std::to_string(m) + "]");
    }
}

void require_r(double r, const char* what) {
    if (!(r >= 1.0 && r < 2.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [1, 2), got " + std::to_string(r));
    }
}

double finite_or_throw(double v, const std::string& what) {
    if (!std::isfinite(v)) throw std::overflow_error(what + " is not representable as a finite double");
    return v;
}

// x^x with 0^0 = 1, in log space.
double x_log_x(int x) { return x == 0 ? 0.0 : static_cast<double>(x) * std::log(static_cast<double>(x)); }

}  // namespace

void BoundReport::add_factor(std::string label, double v) {
    factors.emplace_back(std::move(label), v);
    value *= v;
}

double BoundReport::parameter(const std::string& key) const {
    for (const auto& [k, v] : parameters) {
        if (k == key) return v;
    }
    throw std::out_of_range("bound report '" + name + "' has no parameter '" + key + "'");
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma requires x > 0");
    return std::lgamma(x);
}

double rho(int m, double r, double q) {
    if (m < 1) throw std::invalid_argument("rho: m must be >= 1");
    if (q < 2.0) throw std::invalid_argument("rho: q must be >= 2");
    if (!(r >= 1.0 && r < q)) throw std::invalid_argument("rho: r must satisfy 1 <= r < q");
    return q * m * r / (q + (m - 1) * r);
}

double s_k(int k, double r) {
    if (k < 1) throw std::invalid_argument("s_k: k must be >= 1");
    require_r(r, "s_k: r");
    return 2.0 * k * r / (2.0 + (k - 1) * r);
}

double log_bh_multilinear_constant(int m, double t) {
    if (m < 1) throw std::invalid_argument("bh_multilinear_constant: m must be >= 1");
    require_r(t, "bh_multilinear_constant: t");
    double acc = 0.0;
    for (int j = 2; j <= m; ++j) {
        const double arg = 2.0 - (2.0 - t) / (j * t - 2.0 * t + 2.0);
        const double expo = (t * (j - 2) + 2.0) / (2.0 * t - 2.0 * j * t);
        acc += expo * log_gamma(arg);
    }
    return acc;
}

double bh_multilinear_constant(int m, double t) {
    return finite_or_throw(std::exp(log_bh_multilinear_constant(m, t)), "C_{m,t}");
}

double hypercontractive_bound(int m) {
    if (m < 1) throw std::invalid_argument("hypercontractive_bound: m must be >= 1");
    const double md = m;
    const double log_v = (md - 1.0) * std::log1p(1.0 / md) + 0.5 * std::log(md) + 0.5 * (md - 1.0) * std::log(2.0);
    if (m <= 20) {
        // Direct evaluation keeps small cases at full precision.
        return std::pow(1.0 + 1.0 / md, md - 1.0) * std::sqrt(md) * std::pow(std::sqrt(2.0), md - 1.0);
    }
    return finite_or_throw(std::exp(log_v), "hypercontractive bound");
}

double log_C_mk(int m, int k) {
    require_k(m, k);
    return x_log_x(m) - x_log_x(m - k) + 0.5 * (std::lgamma(m - k + 1.0) - std::lgamma(m + 1.0));
}

double C_mk(int m, int k) {
    require_k(m, k);
    if (m <= 20) {
        // m!/(m-k)! is exact in 64 bits here; the power ratio is a plain product.
        std::uint64_t falling = 1;
        for (int j = m - k + 1; j <= m; ++j) falling *= static_cast<std::uint64_t>(j);
        long double powers = 1.0L;
        for (int j = 0; j < m; ++j) powers *= m;
        for (int j = 0; j < m - k; ++j) powers /= (m - k);
        return static_cast<double>(powers / std::sqrt(static_cast<long double>(falling)));
    }
    return finite_or_throw(std::exp(log_C_mk(m, k)), "C_mk");
}

double harris_factor(int m, int k) {
    require_k(m, k);
    if (m <= 20) {
        std::uint64_t falling = 1;
        for (int j = m - k + 1; j <= m; ++j) falling *= static_cast<std::uint64_t>(j);
        long double powers = 1.0L;
        for (int j = 0; j < m; ++j) powers *= m;
        for (int j = 0; j < m - k; ++j) powers /= (m - k);
        return static_cast<double>(powers / static_cast<long double>(falling));
    }
    const double log_v = x_log_x(m) - x_log_x(m - k) + std::lgamma(m - k + 1.0) - std::lgamma(m + 1.0);
    return finite_or_throw(std::exp(log_v), "harris factor");
}

namespace {

double hypercontractive_prefactor(int m, int k, double r) {
    return std::pow(2.0 / s_k(k, r), 0.5 * (m - k));
}

}  // namespace

double log_scalar_bh_bound(int m, int k) {
    if (m < 2) throw std::invalid_argument("scalar_bh_bound: m must be >= 2");
    require_k(m - 1, k);
    return 0.5 * (m - k) * std::log(2.0 / s_k(k, 1.0)) + log_C_mk(m, k) + log_bh_multilinear_constant(k, 1.0);
}

BoundReport scalar_bh_bound(int m, int k) {
    if (m < 2) throw std::invalid_argument("scalar_bh_bound: m must be >= 2");
    require_k(m - 1, k);
    BoundReport out;
    out.name = "scalar_bh";
    out.parameters = {{"m", m}, {"k", k}, {"r", 1.0}};
    out.add_factor("hypercontractive_prefactor", hypercontractive_prefactor(m, k, 1.0));
    out.add_factor("C_mk", C_mk(m, k));
    out.add_factor("C_k", bh_multilinear_constant(k, 1.0));
    finite_or_throw(out.value, "scalar_bh_bound");
    return out;
}

std::pair<int, double> log_scalar_bh_best(int m) {
    if (m < 2) throw std::invalid_argument("scalar_bh_best: m must be >= 2");
    int best_k = 1;
    double best = log_scalar_bh_bound(m, 1);
    for (int k = 2; k <= m - 1; ++k) {
        const double v = log_scalar_bh_bound(m, k);
        if (v < best) {
            best = v;
            best_k = k;
        }
    }
    return {best_k, best};
}

BestScalarBound scalar_bh_best(int m) {
    const auto [k, log_v] = log_scalar_bh_best(m);
    (void)log_v;
    return {k, scalar_bh_bound(m, k)};
}

KahaneProvider default_kahane_provider() {
    return [](double p) { return p == 2.0 ? 1.0 : std::sqrt(2.0); };
}

double kahane_constant_upper(double p, const KahaneProvider& provider) {
    if (!(p >= 1.0 && p <= 2.0)) {
        throw std::invalid_argument("kahane_constant_upper: p must lie in [1, 2], got " + std::to_string(p));
    }
    const double v = provider ? provider(p) : default_kahane_provider()(p);
    if (!(v >= 1.0) || !std::isfinite(v)) {
        throw std::domain_error("Kahane provider returned " + std::to_string(v) + " (< 1 or not finite)");
    }
    return v;
}

BoundReport vector_bound_2convex(const VectorBoundInputs& in) {
    require_k(in.m, in.k);
    require_r(in.r, "vector_bound_2convex: r");
    if (!(in.M2 >= 1.0) || !(in.C2X >= 1.0)) {
        throw std::invalid_argument("vector_bound_2convex: lattice constants must be >= 1");
    }
    if (!(in.pi_r1 >= 0.0) || !std::isfinite(in.pi_r1)) {
        throw std::invalid_argument("vector_bound_2convex: summing norm must be finite and >= 0");
    }
    BoundReport out;
    out.name = "vector_bh_2convex";
    out.parameters = {{"m", in.m},
                      {"k", in.k},
                      {"r", in.r},
                      {"rho", rho(in.m, in.r, 2.0)},
                      {"s_k", s_k(in.k, in.r)},
                      {"M2", in.M2},
                      {"C2X", in.C2X},
                      {"pi_r1", in.pi_r1}};
    out.add_factor("hypercontractive_prefactor", hypercontractive_prefactor(in.m, in.k, in.r));
    out.add_factor("C_mk", C_mk(in.m, in.k));
    if (in.route == MultilinearRoute::scalar_target) {
        out.add_factor("C_k", bh_multilinear_constant(in.k, in.r));
    } else {
        out.add_factor("cotype", std::pow(in.C2X, in.k - 1));
        double kahane = 1.0;
        for (int j = 1; j <= in.k - 1; ++j) kahane *= kahane_constant_upper(s_k(j, in.r), in.kahane);
        out.add_factor("kahane", kahane);
    }
    out.add_factor("M2", in.M2);
    out.add_factor("pi_r1", in.pi_r1);
    finite_or_throw(out.value, "vector_bound_2convex");
    return out;
}

BoundReport hilbert_lattice_bound(int m, int k, double r) {
    require_k(m, k);
    require_r(r, "hilbert_lattice_bound: r");
    BoundReport out;
    out.name = "hilbert_lattice";
    out.parameters = {{"m", m},
                      {"k", k},
                      {"r", r},
                      {"rho", rho(m, r, 2.0)},
                      {"pi_index", 2.0 * r * (m - 1) / (2.0 + (m - 2) * r)}};
    out.add_factor("hypercontractive_prefactor", hypercontractive_prefactor(m, k, r));
    out.add_factor("C_mk", C_mk(m, k));
    out.add_factor("C_k", bh_multilinear_constant(k, r));
    finite_or_throw(out.value, "hilbert_lattice_bound");
    return out;
}

EnvelopeResult subexp_envelope(double eps, int m_max) {
    if (!(eps > 0.0)) throw std::invalid_argument("subexp_envelope: eps must be > 0");
    if (m_max < 2) throw std::invalid_argument("subexp_envelope: m_max must be >= 2");
    EnvelopeResult out;
    out.eps = eps;
    out.m_max = m_max;
    out.log_kappa = -std::numeric_limits<double>::infinity();
    const double log_base = std::log1p(eps);
    for (int m = 2; m <= m_max; ++m) {
        const auto [k, log_b] = log_scalar_bh_best(m);
        const double log_ratio = log_b - m * log_base;
        out.series.push_back({m, k, log_b, log_ratio});
        if (log_ratio > out.log_kappa) {
            out.log_kappa = log_ratio;
            out.argmax_m = m;
        }
    }
    out.kappa = std::exp(out.log_kappa);
    const std::size_t count = out.series.size();
    const std::size_t tail = std::max<std::size_t>(2, (count + 9) / 10);
    if (count >= 2) {
        out.decreasing_tail = true;
        for (std::size_t i = count - std::min(tail, count) + 1; i < count; ++i) {
            if (!(out.series[i].log_ratio < out.series[i - 1].log_ratio)) out.decreasing_tail = false;
        }
    }
    return out;
}

double asymptotic_exponent(double t) {
    require_r(t, "asymptotic_exponent: t");
    return (kEulerGamma - 1.0) * (t - 2.0) / (2.0 * t);
}

double asymptotic_multilinear_bound(int m, double t, double kappa_t) {
    if (m < 1) throw std::invalid_argument("asymptotic_multilinear_bound: m must be >= 1");
    if (!(kappa_t > 0.0)) throw std::invalid_argument("asymptotic_multilinear_bound: kappa_t must be > 0");
    return kappa_t * std::pow(static_cast<double>(m), asymptotic_exponent(t));
}

double fit_asymptotic_kappa(double t, int m_max) {
    if (m_max < 1) throw std::invalid_argument("fit_asymptotic_kappa: m_max must be >= 1");
    const double e = asymptotic_exponent(t);
    double best = -std::numeric_limits<double>::infinity();
    for (int m = 1; m <= m_max; ++m) {
        best = std::max(best, log_bh_multilinear_constant(m, t) - e * std::log(static_cast<double>(m)));
    }
    // a few ulps of headroom so the fitted form dominates after rounding
    return std::exp(best) * (1.0 + 1e-14);
}

}  // namespace bhl
