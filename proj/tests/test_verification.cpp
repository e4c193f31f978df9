#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bhl/constants.hpp"
#include "bhl/random.hpp"
#include "bhl/verification.hpp"

using namespace bhl;
using doctest::Approx;

namespace {

MultilinearForm gaussian_array(int n, int m, Engine& rng) {
    CVector values(static_cast<std::size_t>(std::pow(n, m)));
    for (auto& c : values) c = complex_gaussian(rng);
    return MultilinearForm(n, m, 1, std::move(values));
}

LinearOperator random_operator(const AtomicFunctionSpace& src, const AtomicFunctionSpace& tgt, Engine& rng) {
    CVector a(static_cast<std::size_t>(src.atoms() * tgt.atoms()));
    for (auto& c : a) c = complex_gaussian(rng);
    return LinearOperator(src, tgt, a);
}

HomogeneousPolynomial z0z1() {
    HomogeneousPolynomial p(2, 2);
    p.set(MultiIndex({1, 1}), 1.0);
    return p;
}

}  // namespace

TEST_CASE("report decision and serialization") {
    CheckReport r;
    r.name = "demo";
    r.lhs = 1.0;
    r.rhs = 1.0 - 1e-12;
    r.tolerance = 1e-9;
    r.decide();
    CHECK(r.pass);
    CHECK(r.status == CheckStatus::passed);
    CHECK(r.margin == Approx(-1e-12));
    r.tolerance = 0.0;
    r.decide();
    CHECK_FALSE(r.pass);
    CHECK(r.status == CheckStatus::failed);
    r.lhs = std::nan("");
    r.tolerance = 1.0;
    r.decide();
    CHECK_FALSE(r.pass);
    r.decline("nothing sound");
    CHECK(r.status == CheckStatus::declined);
    CHECK(status_name(r.status) == "declined");

    r.parameters = {{"m", 2}, {"label", "a\"b"}};
    const auto j = to_json(r);
    CHECK(j["check_name"] == "demo");
    CHECK(j["status"] == "declined");
    CHECK(j["diagnostics"]["declined"] == "nothing sound");
    CHECK(csv_header() == "check_name,status,pass,lhs,rhs,margin,tolerance,parameters");
    const std::string row = to_csv_row(r);
    CHECK(row.rfind("demo,declined,false,", 0) == 0);
    CHECK(row.find("\"{\"\"m\"\":2,\"\"label\"\":\"\"a\\\"\"b\"\"}\"") != std::string::npos);
}

TEST_CASE("Blei inequality") {
    Engine rng = make_engine(31, {1});
    const auto a = gaussian_array(3, 3, rng);
    for (int k = 1; k <= 3; ++k) {
        const auto equal = check_blei(a, k, 1.7, 1.7);
        CHECK(equal.pass);
        CHECK(equal.lhs == Approx(equal.rhs).epsilon(1e-12));
    }
    const auto top = check_blei(a, 3, 1.2, 2.0);
    CHECK(top.parameters["exponent"].get<double>() == Approx(1.2));
    CHECK(top.lhs == Approx(top.rhs).epsilon(1e-12));

    const auto zero = check_blei(MultilinearForm(2, 3), 1, 1.0, 2.0);
    CHECK(zero.pass);
    CHECK(zero.lhs == 0.0);

    const std::pair<double, double> sq[] = {{1.0, 2.0}, {1.0, 1.5}, {1.5, 3.0}, {2.0, 2.0}};
    int failures = 0;
    double worst = 1.0;
    for (int i = 0; i < 1000; ++i) {
        const int m = 2 + i % 3;
        const int n = 2 + (i / 3) % 2;
        const int k = 1 + (i / 6) % m;
        const auto [s, q] = sq[(i / 24) % 4];
        const auto r = check_blei(gaussian_array(n, m, rng), k, s, q);
        if (!r.pass) ++failures;
        worst = std::min(worst, r.diagnostics["relative_slack"].get<double>());
    }
    CHECK(failures == 0);
    CHECK(worst >= -1e-9);
    CHECK_THROWS(check_blei(a, 0, 1.0, 2.0));
    CHECK_THROWS(check_blei(a, 1, 2.0, 1.0));
}

TEST_CASE("scalar polynomial inequality") {
    const auto r = check_scalar_bh(z0z1(), 1);
    CHECK(r.pass);
    CHECK(r.lhs == Approx(1.0));
    CHECK(r.rhs == Approx(4.0).epsilon(1e-13));
    CHECK(r.diagnostics["sup_upper"].get<double>() == Approx(1.0));

    // linear forms: the sum of moduli is the sup norm
    HomogeneousPolynomial lin(3, 1);
    lin.set(MultiIndex({1, 0, 0}), cplx(0.3, 0.4)).set(MultiIndex({0, 1, 0}), cplx(0, -2)).set(MultiIndex({0, 0, 1}), 1.0);
    const auto l = check_scalar_bh(lin, 0);
    CHECK(l.pass);
    CHECK(l.lhs == Approx(3.5));
    CHECK(l.diagnostics["alignment_gap"].get<double>() <= 1e-9);

    CHECK(check_scalar_bh(z0z1(), 0).parameters["k"] == 1);
    CHECK_THROWS(check_scalar_bh(z0z1(), 2));

    EnclosureOptions o;
    o.grid_points = 4096;
    for (int i = 0; i < 40; ++i) {
        const auto p = random_polynomial(1 + i % 4, 2 + i % 3, 1, CoefficientLaw::steinhaus, 300 + i);
        const auto rep = check_scalar_bh(p, 0, o);
        CHECK(rep.pass);
        CHECK(rep.diagnostics["sup_lower"].get<double>() <= rep.diagnostics["sup_upper"].get<double>());
    }
}

TEST_CASE("hypercontractive inequality") {
    HomogeneousPolynomial mono(1, 3);
    mono.set(MultiIndex({3}), cplx(1.2, 0.5));
    const auto r = check_hypercontractive(mono, 1.0, 3.0, 2000, 1);
    CHECK(r.pass);
    CHECK(r.diagnostics["norm_ratio"].get<double>() == Approx(1.0).epsilon(1e-12));

    HomogeneousPolynomial lin(2, 1);
    lin.set(MultiIndex({1, 0}), 1.0).set(MultiIndex({0, 1}), 1.0);
    const auto l = check_hypercontractive(lin, 1.0, 2.0, 20000, 2);
    CHECK(l.pass);
    CHECK(l.lhs == Approx(std::sqrt(2.0)));
    CHECK(l.diagnostics["lhs_method"] == "exact_l2");

    for (int i = 0; i < 20; ++i) {
        const auto p = random_polynomial(1 + i % 3, 1 + i % 3, 1, CoefficientLaw::gaussian, 40 + i);
        CHECK(check_hypercontractive(p, i % 2 ? 2.0 : 1.0, i % 2 ? 4.0 : 2.0, 5000, i).pass);
    }
    CHECK_THROWS(check_hypercontractive(lin, 2.0, 1.0, 100, 1));
}

TEST_CASE("coefficient lemma") {
    const auto scalar = AtomicFunctionSpace::scalar();
    const auto p = random_polynomial(2, 3, 1, CoefficientLaw::gaussian, 5);
    const auto eq = check_coeff_lemma(p, scalar, 2.0, 2.0, 1000, 1);
    CHECK(eq.pass);
    CHECK(eq.lhs == Approx(eq.rhs).epsilon(1e-12));
    CHECK(eq.diagnostics["constant"].get<double>() == 1.0);

    const auto l2 = AtomicFunctionSpace::uniform(2, 2.0);
    for (int i = 0; i < 5; ++i) {
        const auto q = random_polynomial(2, 1 + i % 3, 2, CoefficientLaw::steinhaus, 60 + i);
        CHECK(check_coeff_lemma(q, l2, 2.0, 2.0, 1000, i).pass);
        const auto c = check_coeff_lemma(q, l2, 1.0, 2.0, 20000, i);
        CHECK(c.pass);
        CHECK(c.diagnostics["constant"].get<double>() == Approx(std::pow(2.0, q.degree() / 2.0)));
    }
    // an l_3 model is not 2-concave with a known constant
    const auto l3 = AtomicFunctionSpace::uniform(2, 3.0);
    const auto declined = check_coeff_lemma(random_polynomial(2, 2, 2, CoefficientLaw::steinhaus, 1), l3, 2.0, 2.0, 100, 1);
    CHECK(declined.status == CheckStatus::declined);
}

TEST_CASE("vector-valued inequality") {
    // scalar spaces and the identity reproduce the scalar check
    const auto scalar = AtomicFunctionSpace::scalar();
    for (int m = 2; m <= 4; ++m) {
        const auto p = random_polynomial(2, m, 1, CoefficientLaw::steinhaus, 80 + m);
        for (int k = 1; k < m; ++k) {
            const auto v = check_vector_bh(p, LinearOperator::identity(scalar), 1.0, k);
            const auto s = check_scalar_bh(p, k);
            CHECK(v.pass);
            CHECK(v.diagnostics["constant"].get<double>() == s.diagnostics["constant"].get<double>());
            CHECK(v.lhs == s.lhs);
            CHECK(v.diagnostics["route"] == "scalar_target");
        }
    }

    const auto l1 = AtomicFunctionSpace::uniform(3, 1.0);
    const auto l2 = AtomicFunctionSpace::uniform(2, 2.0);
    Engine rng = make_engine(90, {1});
    for (int i = 0; i < 6; ++i) {
        const auto p = random_polynomial(3, 2, 3, CoefficientLaw::gaussian, 120 + i);
        const auto op = random_operator(l1, l2, rng);
        const auto r = check_vector_bh(p, op, i % 2 ? 1.5 : 1.0, 1 + i % 2);
        CHECK(r.pass);
        CHECK(r.diagnostics["pi_source"] == "grothendieck");
        CHECK(r.witness.empty());
    }

    const auto p = random_polynomial(2, 2, 3, CoefficientLaw::gaussian, 7);
    const auto zero = check_vector_bh(p, LinearOperator::zero(l1, l2), 1.0, 1);
    CHECK(zero.pass);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);

    // no automatic summing bound for an l_2 source
    const auto l2_3 = AtomicFunctionSpace::uniform(3, 2.0);
    const auto op = random_operator(l2_3, l2, rng);
    CHECK(check_vector_bh(p, op, 1.0, 1).status == CheckStatus::declined);
    CHECK(check_vector_bh(p, op, 1.0, 1, {}, 5.0).status != CheckStatus::declined);

    // an unsound caller bound produces a failure with a replayable witness
    const auto bad = check_vector_bh(p, random_operator(l1, l2, rng), 1.0, 1, {}, 1e-6);
    CHECK(bad.status == CheckStatus::failed);
    REQUIRE(bad.witness.size() == 2);
    CHECK(bad.witness[0].first == "polynomial.json");
    CHECK(parse_polynomial(bad.witness[0].second) == p);
    CHECK(bad.witness[1].first == "operator.json");

    CHECK_THROWS(check_vector_bh(p, op, 2.0, 1, {}, 1.0));
    CHECK_THROWS(check_vector_bh(p, op, 1.0, 3, {}, 1.0));
}

TEST_CASE("multilinear Grothendieck-type inequality") {
    const auto l1 = AtomicFunctionSpace::uniform(2, 1.0);
    const auto l2 = AtomicFunctionSpace::uniform(2, 2.0);
    Engine rng = make_engine(91, {1});

    MultilinearForm single(2, 1, 2);
    single.value(std::size_t{0})[0] = 1.0;
    const auto one = check_multilinear_gt(single, LinearOperator(l1, l2, CVector{1.0, 0.0, 0.0, 1.0}), 1.0);
    CHECK(one.pass);
    CHECK(one.lhs == Approx(1.0));
    CHECK(one.rhs == Approx(kComplexGrothendieckUpper));

    for (int i = 0; i < 6; ++i) {
        CVector values(4 * 2);
        for (auto& c : values) c = complex_gaussian(rng);
        const MultilinearForm t(2, 2, 2, values);
        const auto r = check_multilinear_gt(t, random_operator(l1, l2, rng), i % 2 ? 1.5 : 1.0);
        CHECK(r.pass);
        CHECK(r.diagnostics.contains("pi_exponent"));
        CHECK(r.diagnostics.contains("pi_exponent_alternative"));
        CHECK(r.diagnostics.contains("warning"));
    }
    const auto zero = check_multilinear_gt(MultilinearForm(2, 2, 2), random_operator(l1, l2, rng), 1.0);
    CHECK(zero.pass);
    CHECK(zero.lhs == 0.0);

    const auto l2_src = AtomicFunctionSpace::uniform(2, 2.0);
    CHECK(check_multilinear_gt(MultilinearForm(2, 2, 2), random_operator(l2_src, l2, rng), 1.0).status ==
          CheckStatus::declined);
}

TEST_CASE("Hilbert lattice inequality") {
    const auto l1 = AtomicFunctionSpace::uniform(3, 1.0);
    const auto l2 = AtomicFunctionSpace::uniform(2, 2.0);
    Engine rng = make_engine(92, {1});
    for (int i = 0; i < 6; ++i) {
        const int m = 2 + i % 2;
        const auto p = random_polynomial(2, m, 3, CoefficientLaw::gaussian, 140 + i);
        const int k = 1 + i % m;
        const auto r = check_hilbert_lattice(p, random_operator(l1, l2, rng), 1.0, k);
        CHECK(r.pass);
        if (k == m) CHECK(r.diagnostics["factors"]["hypercontractive_prefactor"].get<double>() == 1.0);
    }
    const auto p = random_polynomial(2, 2, 3, CoefficientLaw::gaussian, 1);
    const auto zero = check_hilbert_lattice(p, LinearOperator::zero(l1, l2), 1.0, 1);
    CHECK(zero.pass);
    CHECK(zero.rhs == 0.0);
    CHECK_THROWS(check_hilbert_lattice(random_polynomial(2, 1, 3, CoefficientLaw::gaussian, 1),
                                       LinearOperator::zero(l1, l2), 1.0, 1));
}

TEST_CASE("empirical Kahane ratio") {
    const auto l2 = AtomicFunctionSpace::uniform(3, 2.0);
    const auto single = kahane_empirical(l2, {CVector{1.0, cplx(0, 2), 0.5}}, 1.0, 1000, 1);
    CHECK(single.lhs == Approx(1.0).epsilon(1e-12));
    CHECK(single.pass);

    Engine rng = make_engine(93, {1});
    std::vector<CVector> xs;
    for (int i = 0; i < 4; ++i) xs.push_back(CVector{complex_gaussian(rng), complex_gaussian(rng), complex_gaussian(rng)});
    CHECK(kahane_empirical(l2, xs, 2.0, 1000, 1).lhs == 1.0);

    for (int d : {2, 4, 8}) {
        const auto space = AtomicFunctionSpace::uniform(d, 2.0);
        std::vector<CVector> basis;
        for (int j = 0; j < d; ++j) {
            CVector e(static_cast<std::size_t>(d), cplx{});
            e[static_cast<std::size_t>(j)] = 1.0;
            basis.push_back(e);
        }
        const auto r = kahane_empirical(space, basis, 1.0, 20000, d);
        CHECK(r.pass);
        CHECK(r.lhs >= 1.0);
        CHECK(r.diagnostics["ratio_at_least_one"].get<bool>());
    }
    CHECK_THROWS(kahane_empirical(l2, {}, 1.0, 100, 1));
    CHECK_THROWS(kahane_empirical(l2, xs, 2.5, 100, 1));
}

TEST_CASE("lower-bound search") {
    const auto one = lower_bound_search(1, 3, 20, 1);
    CHECK(one.best_ratio == Approx(1.0).epsilon(1e-12));
    CHECK(one.consistent);

    const auto two = lower_bound_search(2, 2, 1, 1);
    CHECK(two.best_ratio >= 1.0);
    CHECK(two.evaluations == 1);

    for (int m = 2; m <= 4; ++m) {
        const auto r = lower_bound_search(m, 2, 150, 3, 1024);
        CHECK(r.best_ratio >= 1.0);
        CHECK(r.best_ratio <= scalar_bh_best(m).report.value * (1 + 1e-6));
        CHECK(r.consistent);
        CHECK(r.gap == Approx(r.upper - r.best_ratio));
    }
    // nondecreasing in budget
    double prev = 0.0;
    for (int budget : {1, 10, 64, 130, 200}) {
        const double best = lower_bound_search(3, 2, budget, 5, 1024).best_ratio;
        CHECK(best >= prev);
        prev = best;
    }
}

TEST_CASE("suite runner") {
    CHECK(suite_names().size() == 8);
    CHECK(default_trials("blei") == 1000);
    CHECK(default_trials("kahane") == 12);
    CHECK_THROWS_AS(default_trials("nope"), std::invalid_argument);
    CHECK_THROWS_AS(run_suite("nope", {}), std::invalid_argument);

    SuiteConfig c;
    c.trials = 24;
    c.samples = 2000;
    c.grid_points = 4096;
    c.workers = 1;
    const auto serial = run_suite("blei", c);
    c.workers = 3;
    const auto parallel = run_suite("blei", c);
    REQUIRE(serial.size() == 24);
    REQUIRE(parallel.size() == 24);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(to_json(serial[i]) == to_json(parallel[i]));
        CHECK(serial[i].parameters["instance"] == static_cast<int>(i));
    }
    c.seed = 2;
    CHECK(to_json(run_suite("blei", c)[0]) != to_json(serial[0]));

    for (const auto& name : suite_names()) {
        SuiteConfig small;
        small.trials = 4;
        small.samples = 2000;
        small.grid_points = 1024;
        const auto reports = run_suite(name, small);
        CHECK(reports.size() == 4);
        for (const auto& r : reports) CHECK_MESSAGE(r.status == CheckStatus::passed, name);
    }
}
