// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bhl/constants.hpp"
#include "bhl/norms.hpp"
#include "bhl/polynomial.hpp"
#include "bhl/random.hpp"
#include "bhl/verification.hpp"

using namespace bhl;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double time_limit;  // seconds; 0 = none
    std::function<Outcome()> run;
};

std::string fmt(double x, int precision = 12) {
    std::ostringstream s;
    s.precision(precision);
    s << x;
    return s.str();
}

Outcome constants() {
    Outcome o;
    const double h2 = hypercontractive_bound(2);
    const double h3 = hypercontractive_bound(3);
    const double c2 = bh_multilinear_constant(2, 1.0);
    const double h3_ref = 16.0 / 9.0 * std::sqrt(3.0) * 2.0;
    const double c2_ref = 2.0 / std::sqrt(std::numbers::pi);
    o.pass = std::abs(h2 - 3.0) <= 1e-9 && std::abs(h3 - h3_ref) <= 1e-9 && std::abs(c2 - c2_ref) <= 1e-9;
    o.detail = "hyper(2)=" + fmt(h2) + " hyper(3)=" + fmt(h3) + " C_{2,1}=" + fmt(c2);
    return o;
}

Outcome envelope() {
    Outcome o;
    const auto env = subexp_envelope(0.2, 500);
    const bool first = std::isfinite(env.kappa) && env.argmax_m < 500 && env.decreasing_tail;
    int violations = 0;
    int first_bad = 0;
    int last_bad = 0;
    double worst = 0.0;
    for (int m = 100; m <= 500; ++m) {
        const double root = std::exp(log_scalar_bh_best(m).second / m);
        worst = std::max(worst, root);
        if (root > 1.2) {
            if (violations == 0) first_bad = m;
            last_bad = m;
            ++violations;
        }
    }
    o.pass = first && violations == 0;
    o.detail = "kappa=" + fmt(env.kappa) + " m*=" + std::to_string(env.argmax_m) +
               " decreasing_tail=" + (env.decreasing_tail ? "true" : "false") + "; max best^(1/m) on [100,500] = " +
               fmt(worst, 8);
    if (violations > 0) {
        o.detail += "; root bound 1.2 exceeded for " + std::to_string(violations) + " values of m in [" +
                    std::to_string(first_bad) + ", " + std::to_string(last_bad) + "]";
    }
    return o;
}

struct SuiteSummary {
    int passed = 0;
    int failed = 0;
    int declined = 0;
};

SuiteSummary summarize(const std::vector<CheckReport>& reports) {
    SuiteSummary s;
    for (const auto& r : reports) {
        if (r.status == CheckStatus::passed) ++s.passed;
        else if (r.status == CheckStatus::failed) ++s.failed;
        else ++s.declined;
    }
    return s;
}

std::string counts(const SuiteSummary& s) {
    return std::to_string(s.passed) + " passed, " + std::to_string(s.failed) + " failed, " +
           std::to_string(s.declined) + " declined";
}

SuiteConfig default_config() {
    SuiteConfig c;
    c.seed = 1;
    return c;
}

Outcome blei() {
    const auto reports = run_suite("blei", default_config());
    const auto s = summarize(reports);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : reports) worst = std::min(worst, r.diagnostics["relative_slack"].get<double>());
    Outcome o;
    o.pass = reports.size() == 1000 && s.passed == 1000 && worst >= -1e-9;
    o.detail = counts(s) + "; min relative slack " + fmt(worst, 6);
    return o;
}

Outcome scalar_bh() {
    const auto reports = run_suite("scalar-bh", default_config());
    const auto s = summarize(reports);
    double gap = 0.0;
    int linear = 0;
    for (const auto& r : reports) {
        if (r.parameters["m"] == 1) {
            ++linear;
            gap = std::max(gap, r.diagnostics["alignment_gap"].get<double>());
        }
    }
    Outcome o;
    o.pass = reports.size() == 200 && s.passed == 200 && linear > 0 && gap <= 1e-6;
    o.detail = counts(s) + "; m=1 alignment gap max " + fmt(gap, 4) + " over " + std::to_string(linear) + " instances";
    return o;
}

Outcome hypercontractive() {
    const auto reports = run_suite("hypercontractive", default_config());
    const auto s = summarize(reports);
    HomogeneousPolynomial mono(1, 3);
    mono.set(MultiIndex({3}), cplx(0.8, -1.1));
    double deviation = 0.0;
    bool mono_pass = true;
    for (auto [p, q] : {std::pair{1.0, 2.0}, std::pair{2.0, 4.0}}) {
        const auto r = check_hypercontractive(mono, p, q, 20000, 1);
        mono_pass = mono_pass && r.pass;
        deviation = std::max(deviation, std::abs(r.diagnostics["norm_ratio"].get<double>() - 1.0));
    }
    Outcome o;
    o.pass = reports.size() == 100 && s.passed == 100 && mono_pass && deviation <= 1e-12;
    o.detail = counts(s) + "; n=1 monomial |ratio - 1| = " + fmt(deviation, 3);
    return o;
}

Outcome vector_bh() {
    const auto reports = run_suite("vector-bh", default_config());
    const auto s = summarize(reports);
    bool grothendieck = true;
    std::vector<bool> seen_k(4, false);
    for (const auto& r : reports) {
        grothendieck = grothendieck && r.diagnostics.value("pi_source", "") == "grothendieck";
        seen_k[r.parameters["k"].get<std::size_t>()] = true;
    }
    const bool all_k = seen_k[1] && seen_k[2] && seen_k[3];
    Outcome o;
    o.pass = reports.size() == 50 && s.passed == 50 && grothendieck && all_k;
    o.detail = counts(s) + "; pi bound " + (grothendieck ? "grothendieck" : "mixed") + "; k in {1,2,3} covered: " +
               (all_k ? "yes" : "no");
    return o;
}

Outcome scalar_recovery() {
    const auto scalar = AtomicFunctionSpace::scalar();
    const auto id = LinearOperator::identity(scalar);
    double worst = 0.0;
    int cases = 0;
    for (int m = 2; m <= 6; ++m) {
        const auto p = random_polynomial(2, m, 1, CoefficientLaw::steinhaus, 700 + m);
        for (int k = 1; k <= m - 1; ++k) {
            EnclosureOptions eo;
            eo.grid_points = 256;
            eo.budget = 1;
            const auto r = check_vector_bh(p, id, 1.0, k, eo);
            const double expected = scalar_bh_bound(m, k).value;
            worst = std::max(worst, std::abs(r.diagnostics["constant"].get<double>() - expected) / expected);
            ++cases;
        }
    }
    Outcome o;
    o.pass = worst <= 1e-12;
    o.detail = std::to_string(cases) + " (m,k) pairs; max relative deviation " + fmt(worst, 3);
    return o;
}

Outcome kahane() {
    Outcome o;
    for (int d : {2, 4, 8}) {
        std::vector<CVector> basis;
        for (int j = 0; j < d; ++j) {
            CVector e(static_cast<std::size_t>(d), cplx{});
            e[static_cast<std::size_t>(j)] = 1.0;
            basis.push_back(std::move(e));
        }
        const auto r = kahane_empirical(AtomicFunctionSpace::uniform(d, 2.0), basis, 1.0, 100000, 1000 + d);
        const double sigma = r.diagnostics["std_error"].get<double>();
        const bool ok = r.lhs <= std::numbers::sqrt2 + 3.0 * sigma && r.lhs >= 1.0;
        o.pass = o.pass && ok;
        o.detail += (o.detail.empty() ? "" : "; ") + std::string("d=") + std::to_string(d) + " ratio " +
                    fmt(r.lhs, 8) + " (sigma " + fmt(sigma, 2) + ")";
    }
    return o;
}

Outcome soundness() {
    int inverted = 0;
    for (int i = 0; i < 500; ++i) {
        const int n = 1 + i % 4;
        const int m = 1 + (i / 4) % 4;
        const auto law = static_cast<CoefficientLaw>(i % 3);
        const auto p = random_polynomial(n, m, 1, law, 5000 + i);
        const auto tp = TorusPolynomial::from(p);
        const double lo = supnorm_lower(p, 2, i);
        const double up = supnorm_upper(p, auto_grid(tp, 4096));
        if (!(lo <= up)) ++inverted;
    }
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto base = random_polynomial(1 + i % 4, 1 + (i / 4) % 4, 1, CoefficientLaw::steinhaus, 9000 + i);
        CVector values(base.raw().size());
        Engine rng = make_engine(9000 + i, {1});
        for (auto& c : values) c = std::uniform_real_distribution<double>(0.01, 3.0)(rng);
        const HomogeneousPolynomial p(base.dimension(), base.degree(), 1, values);
        const double sum = coeff_lp_norm(p, 1.0);
        const auto e = supnorm_enclosure(p, 2, auto_grid(TorusPolynomial::from(p), 4096), i);
        worst = std::max({worst, std::abs(e.lower - sum) / sum, std::abs(e.upper - sum) / sum});
    }
    Outcome o;
    o.pass = inverted == 0 && worst <= 1e-9;
    o.detail = std::to_string(inverted) + " inverted enclosures in 500; positive family max relative deviation " +
               fmt(worst, 3);
    return o;
}

Outcome polarization() {
    double round_trip = 0.0;
    double diagonal = 0.0;
    Engine rng = make_engine(77, {1});
    for (int i = 0; i < 100; ++i) {
        const int m = 1 + i % 4;
        const int n = 1 + (i / 4) % 4;
        const auto p = random_polynomial(n, m, 1, CoefficientLaw::gaussian, 3000 + i);
        const auto back = depolarize(polarize(p));
        for (std::size_t j = 0; j < p.raw().size(); ++j) {
            round_trip = std::max(round_trip, std::abs(p.raw()[j] - back.raw()[j]) / std::max(1.0, std::abs(p.raw()[j])));
        }
        CVector z(static_cast<std::size_t>(n));
        for (auto& c : z) c = complex_gaussian(rng);
        const cplx direct = evaluate(p, z)[0];
        const cplx form = evaluate_form(polarize(p), std::vector<CVector>(static_cast<std::size_t>(m), z))[0];
        diagonal = std::max(diagonal, std::abs(direct - form) / std::max(1.0, std::abs(direct)));
    }
    Outcome o;
    o.pass = round_trip <= 1e-15 && diagonal <= 1e-12;
    o.detail = "round trip max relative error " + fmt(round_trip, 3) + "; diagonal max relative error " + fmt(diagonal, 3);
    return o;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "constant reproduction", 1.0, constants},
        {2, "subexponentiality witness", 10.0, envelope},
        {3, "Blei exactness", 60.0, blei},
        {4, "scalar polynomial sweep", 300.0, scalar_bh},
        {5, "hypercontractivity", 300.0, hypercontractive},
        {6, "vector-valued desk check", 600.0, vector_bh},
        {7, "scalar recovery consistency", 0.0, scalar_recovery},
        {8, "Kahane empirical", 60.0, kahane},
        {9, "estimator soundness", 0.0, soundness},
        {10, "polarization", 0.0, polarization},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit > 0.0 && seconds >= c.time_limit) {
            o.pass = false;
            o.detail += "; over the time limit of " + fmt(c.time_limit, 4) + " s";
        }
        if (!o.pass) ++failures;
        std::printf("AC%-2d %s  %s: %s [%.2f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.title.c_str(), o.detail.c_str(),
                    seconds);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
