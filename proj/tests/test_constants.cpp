#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bhl/constants.hpp"

using namespace bhl;
using doctest::Approx;

namespace {

double product_of_factors(const BoundReport& b) {
    double p = 1.0;
    for (const auto& [label, v] : b.factors) p *= v;
    return p;
}

}  // namespace

TEST_CASE("log_gamma closed forms") {
    CHECK(log_gamma(1.0) == Approx(0.0).epsilon(1e-15));
    CHECK(log_gamma(1.5) == Approx(std::log(std::sqrt(std::numbers::pi) / 2.0)).epsilon(1e-13));
    CHECK(log_gamma(1.5) == Approx(-0.12078223763524522).epsilon(1e-12));
    CHECK(log_gamma(5.0) == Approx(std::log(24.0)).epsilon(1e-13));
    // half-integers: Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!)
    for (int k = 0; k < 40; ++k) {
        double log_v = 0.5 * std::log(std::numbers::pi) - k * std::log(4.0);
        for (int j = k + 1; j <= 2 * k; ++j) log_v += std::log(static_cast<double>(j));
        CHECK(log_gamma(k + 0.5) == Approx(log_v).epsilon(1e-12));
    }
    CHECK_THROWS(log_gamma(0.0));
    CHECK_THROWS(log_gamma(-1.0));
}

TEST_CASE("rho and s_k") {
    CHECK(rho(1, 1.3, 2.0) == Approx(1.3));
    CHECK(rho(1, 1.0, 3.0) == Approx(1.0));
    CHECK(rho(2, 1.0, 2.0) == Approx(4.0 / 3.0));
    for (int m = 1; m <= 30; ++m) {
        CHECK(rho(m, 1.0) == Approx(2.0 * m / (m + 1.0)));
        CHECK(s_k(m, 1.5) == rho(m, 1.5, 2.0));
        CHECK(rho(m + 1, 1.2) > rho(m, 1.2));
        CHECK(rho(m, 1.3) > rho(m, 1.2));
        CHECK(s_k(m, 1.9) < 2.0);
        CHECK(s_k(m + 1, 1.0) > s_k(m, 1.0));
    }
    CHECK(s_k(1, 1.7) == Approx(1.7));
    CHECK(s_k(2, 1.0) == Approx(4.0 / 3.0));
    CHECK_THROWS(rho(2, 2.0, 2.0));
    CHECK_THROWS(s_k(2, 2.0));
    CHECK_THROWS(s_k(2, 0.5));
}

TEST_CASE("multilinear constant") {
    CHECK(bh_multilinear_constant(1, 1.0) == 1.0);
    // high-precision oracle values
    CHECK(bh_multilinear_constant(2, 1.0) == Approx(1.1283791670955126).epsilon(1e-13));
    CHECK(bh_multilinear_constant(3, 1.0) == Approx(1.2183754370074189).epsilon(1e-13));
    CHECK(bh_multilinear_constant(2, 1.0) == Approx(2.0 / std::sqrt(std::numbers::pi)).epsilon(1e-13));
    double prev = 0.0;
    for (int m = 1; m <= 1000; ++m) {
        const double c = bh_multilinear_constant(m, 1.0);
        CHECK(std::isfinite(c));
        CHECK(c >= prev);
        prev = c;
    }
    CHECK_THROWS(bh_multilinear_constant(3, 2.0));
    CHECK_THROWS(bh_multilinear_constant(0, 1.0));
}

TEST_CASE("hypercontractive bound") {
    CHECK(hypercontractive_bound(1) == Approx(1.0).epsilon(1e-14));
    CHECK(hypercontractive_bound(2) == Approx(3.0).epsilon(1e-14));
    CHECK(hypercontractive_bound(3) == Approx(16.0 / 9.0 * std::sqrt(3.0) * 2.0).epsilon(1e-14));
    CHECK(hypercontractive_bound(3) == Approx(6.158402871356008).epsilon(1e-13));
    CHECK(std::isfinite(hypercontractive_bound(1000)));
}

TEST_CASE("C_mk and harris_factor") {
    CHECK(C_mk(1, 1) == Approx(1.0));
    CHECK(C_mk(2, 1) == Approx(4.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(C_mk(2, 2) == Approx(4.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(harris_factor(2, 1) == Approx(2.0).epsilon(1e-14));
    CHECK(harris_factor(3, 1) == Approx(9.0 / 4.0).epsilon(1e-14));
    for (int m = 1; m <= 8; ++m) {
        double fact = 1.0;
        for (int j = 2; j <= m; ++j) fact *= j;
        CHECK(harris_factor(m, m) == Approx(std::pow(m, m) / fact).epsilon(1e-13));
        for (int k = 1; k <= m; ++k) {
            double fmk = 1.0;
            for (int j = 2; j <= m - k; ++j) fmk *= j;
            CHECK(harris_factor(m, k) == Approx(C_mk(m, k) * std::sqrt(fmk / fact)).epsilon(1e-13));
        }
    }
    // the log-space path agrees with the exact one where both apply
    CHECK(std::exp(log_C_mk(20, 7)) == Approx(C_mk(20, 7)).epsilon(1e-12));
    CHECK(std::isfinite(log_C_mk(1000, 10)));
    CHECK_THROWS(C_mk(3, 0));
    CHECK_THROWS(C_mk(3, 4));
}

TEST_CASE("scalar bound from the displayed formula") {
    // mpmath oracle values of (1 + 1/k)^{(m-k)/2} C_mk C_{k,1}
    CHECK(scalar_bh_bound(2, 1).value == Approx(4.0).epsilon(1e-13));
    CHECK(scalar_bh_bound(3, 1).value == Approx(7.794228634059948).epsilon(1e-13));
    CHECK(scalar_bh_bound(3, 2).value == Approx(15.233118755789420).epsilon(1e-13));
    CHECK(scalar_bh_bound(4, 1).value == Approx(13.408839702500457).epsilon(1e-13));
    CHECK(scalar_bh_bound(4, 2).value == Approx(31.27056076178687).epsilon(1e-13));
    CHECK(scalar_bh_bound(4, 3).value == Approx(73.51650419533390).epsilon(1e-13));
    const BoundReport b = scalar_bh_bound(5, 2);
    REQUIRE(b.factors.size() == 3);
    CHECK(b.factors[0].first == "hypercontractive_prefactor");
    CHECK(b.factors[0].second == Approx(std::pow(1.5, 1.5)).epsilon(1e-14));
    CHECK(b.factors[2].second == Approx(bh_multilinear_constant(2, 1.0)).epsilon(1e-14));
    CHECK_THROWS(scalar_bh_bound(1, 1));
    CHECK_THROWS(scalar_bh_bound(3, 3));
}

TEST_CASE("every bound report is the product of its factors") {
    for (int m = 2; m <= 40; ++m) {
        for (int k = 1; k < m; ++k) {
            const auto b = scalar_bh_bound(m, k);
            CHECK(b.value == Approx(product_of_factors(b)).epsilon(1e-12));
            CHECK(std::log(b.value) == Approx(log_scalar_bh_bound(m, k)).epsilon(1e-12));
        }
    }
    for (int m = 1; m <= 6; ++m) {
        for (int k = 1; k <= m; ++k) {
            const auto h = hilbert_lattice_bound(m, k, 1.5);
            CHECK(h.value == Approx(product_of_factors(h)).epsilon(1e-12));
            VectorBoundInputs in;
            in.m = m;
            in.k = k;
            in.r = 1.25;
            in.M2 = 1.5;
            in.C2X = 1.2;
            in.pi_r1 = 2.0;
            const auto v = vector_bound_2convex(in);
            CHECK(v.value == Approx(product_of_factors(v)).epsilon(1e-12));
        }
    }
}

TEST_CASE("best split point") {
    const auto b2 = scalar_bh_best(2);
    CHECK(b2.k == 1);
    CHECK(b2.report.value == Approx(4.0).epsilon(1e-13));
    const auto b3 = scalar_bh_best(3);
    CHECK(b3.k == 1);
    CHECK(b3.report.value == Approx(7.794228634059948).epsilon(1e-13));
    // oracle scan values
    CHECK(scalar_bh_best(20).k == 2);
    CHECK(scalar_bh_best(20).report.value == Approx(5930.3375523560201).epsilon(1e-12));
    CHECK(log_scalar_bh_best(100).first == 3);
    CHECK(std::exp(log_scalar_bh_best(100).second) == Approx(27228329741.7722).epsilon(1e-11));
    CHECK(log_scalar_bh_best(500).first == 7);
    CHECK(log_scalar_bh_best(500).second == Approx(std::log(8.4778661989300443e+26)).epsilon(1e-13));
    for (int m = 2; m <= 60; ++m) {
        const auto best = scalar_bh_best(m);
        for (int k = 1; k < m; ++k) CHECK(best.report.value <= scalar_bh_bound(m, k).value);
        CHECK(best.k == log_scalar_bh_best(m).first);
    }
}

TEST_CASE("best scalar bound falls below the hypercontractive one for good") {
    int m0 = 0;
    for (int m = 2; m <= 500; ++m) {
        const bool below = log_scalar_bh_best(m).second <= std::log(hypercontractive_bound(m));
        if (below && m0 == 0) m0 = m;
        if (!below) m0 = 0;
    }
    MESSAGE("scalar bound is below the hypercontractive bound from m = " << m0);
    CHECK(m0 >= 2);
}

TEST_CASE("vector-valued bound") {
    VectorBoundInputs in;
    in.m = 2;
    in.k = 1;
    CHECK(vector_bound_2convex(in).value == Approx(4.0).epsilon(1e-13));

    // k = 1: empty Kahane product and no cotype factor
    in.m = 4;
    in.k = 1;
    in.r = 1.5;
    in.M2 = 1.3;
    in.C2X = 1.7;
    in.pi_r1 = 0.8;
    const double expected = std::pow(2.0 / 1.5, 1.5) * C_mk(4, 1) * 1.3 * 0.8;
    CHECK(vector_bound_2convex(in).value == Approx(expected).epsilon(1e-13));

    // k = m: no prefactor
    in.k = 4;
    double kahane = 1.0;
    for (int j = 1; j <= 3; ++j) kahane *= kahane_constant_upper(s_k(j, 1.5));
    CHECK(vector_bound_2convex(in).value ==
          Approx(std::pow(1.7, 3) * kahane * C_mk(4, 4) * 1.3 * 0.8).epsilon(1e-13));

    // a sharper injected provider lowers the bound
    in.kahane = [](double p) { return p == 2.0 ? 1.0 : 1.1; };
    CHECK(vector_bound_2convex(in).value < std::pow(1.7, 3) * kahane * C_mk(4, 4) * 1.3 * 0.8);

    in.kahane = {};
    in.r = 2.0;
    CHECK_THROWS(vector_bound_2convex(in));
    in.r = 1.0;
    in.k = 5;
    CHECK_THROWS(vector_bound_2convex(in));
}

TEST_CASE("scalar recovery reproduces the scalar bound exactly") {
    for (int m = 2; m <= 12; ++m) {
        for (int k = 1; k < m; ++k) {
            VectorBoundInputs in;
            in.m = m;
            in.k = k;
            in.route = MultilinearRoute::scalar_target;
            CHECK(vector_bound_2convex(in).value == scalar_bh_bound(m, k).value);
        }
    }
}

TEST_CASE("Hilbert lattice bound") {
    CHECK(hilbert_lattice_bound(2, 1, 1.0).value == Approx(4.0).epsilon(1e-13));
    CHECK(hilbert_lattice_bound(3, 2, 1.0).value ==
          Approx(std::sqrt(1.5) * C_mk(3, 2) * 2.0 / std::sqrt(std::numbers::pi)).epsilon(1e-13));
    for (int m = 1; m <= 5; ++m) {
        CHECK(hilbert_lattice_bound(m, m, 1.3).value ==
              Approx(C_mk(m, m) * bh_multilinear_constant(m, 1.3)).epsilon(1e-13));
    }
    CHECK(hilbert_lattice_bound(4, 2, 1.5).parameter("pi_index") == Approx(2.0 * 1.5 * 3 / (2.0 + 2 * 1.5)));
}

TEST_CASE("Kahane provider") {
    CHECK(kahane_constant_upper(2.0) == 1.0);
    CHECK(kahane_constant_upper(1.0) == Approx(std::sqrt(2.0)));
    const double mid = kahane_constant_upper(1.5);
    CHECK(mid >= 1.0);
    CHECK(mid <= std::sqrt(2.0));
    CHECK_THROWS(kahane_constant_upper(0.9));
    CHECK_THROWS(kahane_constant_upper(2.1));
    CHECK_THROWS(kahane_constant_upper(1.5, [](double) { return 0.5; }));
}

TEST_CASE("subexponential envelope") {
    const auto env = subexp_envelope(0.2, 500);
    CHECK(std::isfinite(env.kappa));
    CHECK(env.argmax_m == 51);
    CHECK(env.kappa == Approx(765.9470039758728).epsilon(1e-11));
    CHECK(env.series[static_cast<std::size_t>(env.argmax_m - 2)].k_star == 3);
    CHECK(env.decreasing_tail);
    CHECK(env.series.size() == 499);

    CHECK(subexp_envelope(10.0, 100).argmax_m == 2);
    const auto single = subexp_envelope(0.3, 2);
    CHECK(single.kappa == Approx(4.0 / (1.3 * 1.3)).epsilon(1e-13));
    CHECK(subexp_envelope(0.01, 500).kappa >= subexp_envelope(0.01, 50).kappa);
    CHECK_THROWS(subexp_envelope(0.0, 10));
    CHECK_THROWS(subexp_envelope(0.2, 1));
}

TEST_CASE("m-th root of the best scalar bound decreases toward 1") {
    // oracle: 1.2716 at m = 100, 1.1320 at m = 500
    CHECK(std::exp(log_scalar_bh_best(100).second / 100) == Approx(1.2715990945880661).epsilon(1e-12));
    CHECK(std::exp(log_scalar_bh_best(500).second / 500) == Approx(1.1320264468128963).epsilon(1e-12));
    CHECK(std::exp(log_scalar_bh_best(196).second / 196) == Approx(1.200805777896331).epsilon(1e-12));
    CHECK(std::exp(log_scalar_bh_best(200).second / 200) < 1.2);
}

TEST_CASE("asymptotic multilinear form") {
    CHECK(asymptotic_exponent(1.0) == Approx((1.0 - kEulerGamma) / 2.0).epsilon(1e-14));
    CHECK(asymptotic_exponent(1.0) == Approx(0.21139216754923355).epsilon(1e-13));
    CHECK(asymptotic_exponent(1.5) > 0.0);
    CHECK(asymptotic_multilinear_bound(1, 1.0, 2.5) == 2.5);
    const double kappa = fit_asymptotic_kappa(1.0, 100);
    for (int m = 1; m <= 100; ++m) {
        CHECK(asymptotic_multilinear_bound(m, 1.0, kappa) >= bh_multilinear_constant(m, 1.0));
    }
    // least such kappa: shrinking it breaks domination somewhere
    bool broken = false;
    for (int m = 1; m <= 100; ++m) {
        broken = broken || asymptotic_multilinear_bound(m, 1.0, kappa * (1 - 1e-9)) < bh_multilinear_constant(m, 1.0);
    }
    CHECK(broken);
}
