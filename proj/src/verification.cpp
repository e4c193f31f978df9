#include "bhl/verification.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "bhl/combinatorics.hpp"
#include "bhl/constants.hpp"
#include "bhl/random.hpp"

namespace bhl {

using nlohmann::ordered_json;

namespace {

std::uint64_t substream(std::uint64_t seed, std::uint64_t tag) {
    Engine e = make_engine(seed, {0x73756273, tag});
    return e();
}

constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

ordered_json factors_json(const BoundReport& b) {
    ordered_json out = ordered_json::object();
    for (const auto& [label, value] : b.factors) out[label] = value;
    return out;
}

std::string serialize_form(const MultilinearForm& t) {
    ordered_json doc;
    doc["n"] = t.dimension();
    doc["m"] = t.degree();
    doc["coeff_dim"] = t.coeff_dim();
    ordered_json values = ordered_json::array();
    for (const cplx& c : t.raw()) values.push_back({c.real(), c.imag()});
    doc["values"] = std::move(values);
    return doc.dump(2);
}

HomogeneousPolynomial apply_operator(const HomogeneousPolynomial& p, const LinearOperator& v) {
    if (p.coeff_dim() != v.cols()) {
        throw std::invalid_argument("coefficients have dimension " + std::to_string(p.coeff_dim()) +
                                    " but the operator source has " + std::to_string(v.cols()) + " atoms");
    }
    HomogeneousPolynomial out(p.dimension(), p.degree(), v.rows());
    for (std::size_t pos = 0; pos < p.term_count(); ++pos) {
        const CVector image = v.apply(p.coefficient(pos));
        std::copy(image.begin(), image.end(), out.coefficient(pos).begin());
    }
    return out;
}

void require_r(double r) {
    if (!(r >= 1.0 && r < 2.0)) throw std::invalid_argument("r must lie in [1, 2)");
}

void require_hilbert_target(const LinearOperator& v) {
    if (v.target().exponent() != 2.0) throw std::invalid_argument("the operator target must be a q = 2 model");
}

struct PiBound {
    double value = 0.0;
    std::string source;
};

// Sound upper bound for every summing norm pi_{(s,1)}(v), s >= 1.
std::optional<PiBound> automatic_pi_bound(const LinearOperator& v) {
    if (v.cols() == 1) {
        // one-dimensional source: pi_{(s,1)}(v) = ||v||
        const CVector e{cplx{1.0, 0.0}};
        return PiBound{v.target().norm(v.apply(e)) / v.source().norm(e), "operator_norm_rank_one_source"};
    }
    if (v.source().exponent() == 1.0 && v.target().exponent() == 2.0) {
        return PiBound{grothendieck_upper(v), "grothendieck"};
    }
    return std::nullopt;
}

// Upper end of the sup-norm enclosure (used on the large side) plus the
// ascent lower end for reporting.
double enclosure_upper(const TorusPolynomial& tp, const EnclosureOptions& o, const Target& target,
                       ordered_json& diag) {
    const int grid = o.grid > 0 ? o.grid : auto_grid(tp, o.grid_points);
    const double upper = supnorm_upper(tp, grid, target);
    diag["grid_per_axis"] = grid;
    diag["sup_upper"] = upper;
    if (o.budget > 0) {
        const double lower = supnorm_lower(tp, o.budget, o.seed, target);
        diag["sup_lower"] = lower;
        diag["enclosure_width"] = upper - lower;
        diag["ascent_starts"] = o.budget;
        diag["ascent_seed"] = o.seed;
    }
    return upper;
}

double vector_lhs(const HomogeneousPolynomial& p, const LinearOperator& v, double exponent) {
    return coeff_lp_norm(apply_operator(p, v), exponent, v.target());
}

void attach_witness(CheckReport& r, const HomogeneousPolynomial* p, const LinearOperator* v) {
    if (r.status != CheckStatus::failed) return;
    if (p) r.witness.emplace_back("polynomial.json", serialize(*p));
    if (v) r.witness.emplace_back("operator.json", serialize(*v));
}

}  // namespace

std::string_view status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::passed: return "passed";
        case CheckStatus::failed: return "failed";
        case CheckStatus::declined: return "declined";
    }
    return "unknown";
}

void CheckReport::decide() {
    margin = rhs - lhs;
    pass = std::isfinite(lhs) && std::isfinite(rhs) && lhs <= rhs + tolerance;
    status = pass ? CheckStatus::passed : CheckStatus::failed;
}

void CheckReport::decline(const std::string& reason) {
    pass = false;
    status = CheckStatus::declined;
    diagnostics["declined"] = reason;
}

ordered_json to_json(const CheckReport& r) {
    ordered_json out;
    out["check_name"] = r.name;
    out["parameters"] = r.parameters;
    out["lhs"] = r.lhs;
    out["rhs"] = r.rhs;
    out["margin"] = r.margin;
    out["pass"] = r.pass;
    out["status"] = status_name(r.status);
    out["tolerance"] = r.tolerance;
    out["diagnostics"] = r.diagnostics;
    return out;
}

std::string csv_header() { return "check_name,status,pass,lhs,rhs,margin,tolerance,parameters"; }

std::string to_csv_row(const CheckReport& r) {
    auto number = [](double x) {
        std::ostringstream s;
        s.precision(17);
        s << x;
        return s.str();
    };
    std::string params = r.parameters.dump();
    std::string quoted = "\"";
    for (char c : params) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return r.name + "," + std::string(status_name(r.status)) + "," + (r.pass ? "true" : "false") + "," +
           number(r.lhs) + "," + number(r.rhs) + "," + number(r.margin) + "," + number(r.tolerance) + "," + quoted;
}

int auto_grid(const TorusPolynomial& p, std::uint64_t max_points) {
    const std::size_t free = free_axes(p).size();
    if (free == 0 || max_points < 2) return 1;
    auto fits = [&](std::uint64_t g) {
        std::uint64_t total = 1;
        for (std::size_t k = 0; k < free; ++k) {
            if (total > max_points / g) return false;
            total *= g;
        }
        return total <= max_points;
    };
    std::uint64_t g = static_cast<std::uint64_t>(std::pow(static_cast<double>(max_points), 1.0 / free));
    g = std::max<std::uint64_t>(g, 1);
    while (g > 1 && !fits(g)) --g;
    while (fits(g + 1)) ++g;
    return static_cast<int>(std::min<std::uint64_t>(g, 1u << 20));
}

CheckReport check_blei(const MultilinearForm& a, int k, double s, double q) {
    const int m = a.degree();
    if (k < 1 || k > m) throw std::invalid_argument("check_blei: k must lie in [1, m]");
    if (!(s >= 1.0) || !(s <= q)) throw std::invalid_argument("check_blei: requires 1 <= s <= q");
    if (a.coeff_dim() != 1) throw std::invalid_argument("check_blei: scalar array required");

    CheckReport r;
    r.name = "blei";
    const double exponent = m * s * q / (k * q + (m - k) * s);
    r.parameters = {{"m", m}, {"n", a.dimension()}, {"k", k}, {"s", s}, {"q", q}, {"exponent", exponent}};
    r.lhs = array_lp_norm(a, exponent);

    const auto subsets = enumerate_subsets(m, k);
    double log_sum = 0.0;
    bool zero = false;
    ordered_json mixed = ordered_json::array();
    for (const auto& pair : subsets) {
        const double value = mixed_norm(a, pair, s, q);
        mixed.push_back(value);
        if (value == 0.0) zero = true;
        else log_sum += std::log(value);
    }
    r.rhs = zero ? 0.0 : std::exp(log_sum / static_cast<double>(subsets.size()));
    r.tolerance = kExactTolerance * r.rhs;
    r.diagnostics["mixed_norms"] = std::move(mixed);
    r.diagnostics["relative_slack"] = r.rhs > 0.0 ? (r.rhs - r.lhs) / r.rhs : 0.0;
    r.decide();
    if (r.status == CheckStatus::failed) r.witness.emplace_back("array.json", serialize_form(a));
    return r;
}

CheckReport check_scalar_bh(const HomogeneousPolynomial& p, int k, const EnclosureOptions& options) {
    if (p.coeff_dim() != 1) throw std::invalid_argument("check_scalar_bh: scalar polynomial required");
    const int m = p.degree();
    CheckReport r;
    r.name = "scalar_bh";
    const double exponent = 2.0 * m / (m + 1.0);
    const TorusPolynomial tp = TorusPolynomial::from(p);

    double constant = 1.0;
    if (m == 1) {
        k = 1;
        r.diagnostics["constant"] = 1.0;
    } else {
        if (k == 0) k = scalar_bh_best(m).k;
        if (k < 1 || k > m - 1) throw std::invalid_argument("check_scalar_bh: k must lie in [1, m - 1]");
        const BoundReport bound = scalar_bh_bound(m, k);
        constant = bound.value;
        r.diagnostics["constant"] = constant;
        r.diagnostics["factors"] = factors_json(bound);
        r.diagnostics["k_star"] = scalar_bh_best(m).k;
    }
    r.parameters = {{"m", m}, {"n", p.dimension()}, {"k", k}, {"exponent", exponent}};
    r.lhs = coeff_lp_norm(p, exponent);
    EnclosureOptions o = options;
    if (m == 1) o.budget = std::max(o.budget, 1);
    const double upper = enclosure_upper(tp, o, std::nullopt, r.diagnostics);
    r.rhs = constant * upper;
    r.tolerance = 0.0;
    if (m == 1) {
        // linear forms: sum |c_i| is attained by aligning the phases
        const double lower = r.diagnostics["sup_lower"].get<double>();
        r.diagnostics["alignment_gap"] = std::abs(r.lhs - lower);
    }
    r.decide();
    attach_witness(r, &p, nullptr);
    return r;
}

CheckReport check_hypercontractive(const HomogeneousPolynomial& p, double lp, double lq, std::uint64_t samples,
                                   std::uint64_t seed) {
    if (!(lp > 0.0) || !(lq > lp) || !std::isfinite(lq)) {
        throw std::invalid_argument("check_hypercontractive: requires 0 < p < q < infinity");
    }
    if (p.coeff_dim() != 1) throw std::invalid_argument("check_hypercontractive: scalar polynomial required");
    const int m = p.degree();
    CheckReport r;
    r.name = "hypercontractive";
    r.parameters = {{"m", m}, {"n", p.dimension()}, {"p", lp}, {"q", lq}, {"samples", samples}, {"seed", seed}};
    const double constant = std::pow(lq / lp, m / 2.0);

    double lhs_se = 0.0;
    if (lq == 2.0) {
        r.lhs = exact_l2_torus(p);
        r.diagnostics["lhs_method"] = "exact_l2";
    } else {
        const auto est = torus_lp_norm(p, lq, samples, substream(seed, 1));
        r.lhs = est.estimate;
        lhs_se = est.std_error;
        r.diagnostics["lhs_method"] = "monte_carlo";
    }
    const auto low = torus_lp_norm(p, lp, samples, substream(seed, 2));
    r.rhs = constant * low.estimate;
    r.tolerance = kSigmaTolerance * std::hypot(lhs_se, constant * low.std_error) + kExactTolerance * r.rhs;
    r.diagnostics["constant"] = constant;
    r.diagnostics["lhs_std_error"] = lhs_se;
    r.diagnostics["lp_estimate"] = low.estimate;
    r.diagnostics["lp_std_error"] = low.std_error;
    r.diagnostics["norm_ratio"] = low.estimate > 0.0 ? r.lhs / low.estimate : 1.0;
    r.decide();
    attach_witness(r, &p, nullptr);
    return r;
}

CheckReport check_coeff_lemma(const HomogeneousPolynomial& p, const AtomicFunctionSpace& x, double lp, double lq,
                              std::uint64_t samples, std::uint64_t seed) {
    if (!(lp >= 1.0 && lp <= 2.0 && lq >= 2.0 && std::isfinite(lq))) {
        throw std::invalid_argument("check_coeff_lemma: requires 1 <= p <= 2 <= q < infinity");
    }
    if (p.coeff_dim() != x.atoms()) throw std::invalid_argument("check_coeff_lemma: coefficient dimension mismatch");
    const int m = p.degree();
    CheckReport r;
    r.name = "coeff_lemma";
    r.parameters = {{"m", m},           {"n", p.dimension()}, {"atoms", x.atoms()}, {"space_exponent", x.exponent()},
                    {"p", lp},          {"q", lq},           {"samples", samples}, {"seed", seed}};
    const LatticeConstants lattice = lattice_constants(x, 1, seed);
    const auto concavity = lattice.concavity(lq);
    const auto convexity = lattice.convexity(lp);
    if (!concavity || !convexity) {
        r.decline("space is not known to be p-convex and q-concave");
        return r;
    }
    const double constant = std::pow(2.0 / lp, m / 2.0) * *concavity;
    r.lhs = coeff_lp_norm(p, lq, x);
    double se = 0.0;
    double integral = 0.0;
    if (lp == 2.0 && x.exponent() == 2.0) {
        integral = exact_l2_torus(p, x);
        r.diagnostics["integral_method"] = "exact_l2";
    } else {
        const auto est = torus_lp_norm(p, lp, samples, substream(seed, 3), x);
        integral = est.estimate;
        se = est.std_error;
        r.diagnostics["integral_method"] = "monte_carlo";
    }
    r.rhs = constant * integral;
    r.tolerance = kSigmaTolerance * constant * se + kExactTolerance * r.rhs;
    r.diagnostics["constant"] = constant;
    r.diagnostics["M_q"] = *concavity;
    r.diagnostics["M^p"] = *convexity;
    r.diagnostics["integral"] = integral;
    r.diagnostics["integral_std_error"] = se;
    r.decide();
    attach_witness(r, &p, nullptr);
    return r;
}

CheckReport check_vector_bh(const HomogeneousPolynomial& p, const LinearOperator& v, double r_exp, int k,
                            const EnclosureOptions& options, std::optional<double> pi_upper) {
    require_r(r_exp);
    require_hilbert_target(v);
    const int m = p.degree();
    if (k < 1 || k > m) throw std::invalid_argument("check_vector_bh: k must lie in [1, m]");
    if (p.coeff_dim() != v.cols()) throw std::invalid_argument("check_vector_bh: coefficient dimension mismatch");

    CheckReport r;
    r.name = "vector_bh";
    const double exponent = rho(m, r_exp, 2.0);
    r.parameters = {{"m", m},
                    {"n", p.dimension()},
                    {"k", k},
                    {"r", r_exp},
                    {"rho", exponent},
                    {"source_atoms", v.cols()},
                    {"source_exponent", v.source().exponent()},
                    {"target_atoms", v.rows()}};

    PiBound pi;
    if (pi_upper) {
        pi = {*pi_upper, "caller"};
    } else if (auto automatic = automatic_pi_bound(v)) {
        pi = *automatic;
    } else {
        r.decline("no sound upper bound for the summing norm of v");
        return r;
    }

    const LatticeConstants lattice = lattice_constants(v.target(), 50, options.seed);
    VectorBoundInputs in;
    in.m = m;
    in.k = k;
    in.r = r_exp;
    in.M2 = lattice.concavity(2.0).value();
    in.C2X = lattice.cotype2.upper;
    in.pi_r1 = pi.value;
    in.route = v.rows() == 1 ? MultilinearRoute::scalar_target : MultilinearRoute::lattice;
    const BoundReport bound = vector_bound_2convex(in);

    r.lhs = vector_lhs(p, v, exponent);
    const double upper = enclosure_upper(TorusPolynomial::from(p), options, v.source(), r.diagnostics);
    r.rhs = bound.value * upper;
    r.tolerance = 0.0;
    r.diagnostics["constant"] = bound.value;
    r.diagnostics["factors"] = factors_json(bound);
    r.diagnostics["route"] = in.route == MultilinearRoute::scalar_target ? "scalar_target" : "lattice";
    r.diagnostics["pi_upper"] = pi.value;
    r.diagnostics["pi_source"] = pi.source;
    r.decide();
    attach_witness(r, &p, &v);
    return r;
}

CheckReport check_multilinear_gt(const MultilinearForm& t, const LinearOperator& v, double r_exp,
                                 const EnclosureOptions& options) {
    require_r(r_exp);
    require_hilbert_target(v);
    if (t.coeff_dim() != v.cols()) throw std::invalid_argument("check_multilinear_gt: value dimension mismatch");
    const int m = t.degree();
    CheckReport r;
    r.name = "multilinear_gt";
    const double exponent = rho(m, r_exp, 2.0);
    r.parameters = {{"m", m}, {"n", t.dimension()}, {"r", r_exp}, {"rho", exponent}, {"source_atoms", v.cols()}};
    // The text's summing index here is garbled; rho is used and the index of
    // the Hilbert-lattice statement is reported next to it.
    r.diagnostics["pi_exponent"] = exponent;
    r.diagnostics["pi_exponent_alternative"] = 2.0 * r_exp * (m - 1) / (2.0 + (m - 2) * r_exp);
    r.diagnostics["warning"] = "summing index ambiguous; the Grothendieck bound covers every index >= 1";
    if (v.source().exponent() != 1.0) {
        r.decline("source is not an l_1 model");
        return r;
    }
    std::vector<double> norms(t.entry_count());
    for (std::size_t flat = 0; flat < norms.size(); ++flat) {
        norms[flat] = v.target().norm(v.apply(t.value(flat)));
    }
    r.lhs = lp_norm(norms, exponent);
    const double pi = grothendieck_upper(v);
    const double constant = bh_multilinear_constant(m, r_exp);
    const double upper = enclosure_upper(TorusPolynomial::from(t), options, v.source(), r.diagnostics);
    r.rhs = constant * pi * upper;
    r.tolerance = 0.0;
    r.diagnostics["constant"] = constant;
    r.diagnostics["pi_upper"] = pi;
    r.decide();
    if (r.status == CheckStatus::failed) {
        r.witness.emplace_back("form.json", serialize_form(t));
        r.witness.emplace_back("operator.json", serialize(v));
    }
    return r;
}

CheckReport check_hilbert_lattice(const HomogeneousPolynomial& p, const LinearOperator& v, double r_exp, int k,
                                  const EnclosureOptions& options) {
    require_r(r_exp);
    require_hilbert_target(v);
    const int m = p.degree();
    if (m < 2) throw std::invalid_argument("check_hilbert_lattice: requires m >= 2");
    if (k < 1 || k > m) throw std::invalid_argument("check_hilbert_lattice: k must lie in [1, m]");
    if (p.coeff_dim() != v.cols()) throw std::invalid_argument("check_hilbert_lattice: coefficient dimension mismatch");
    CheckReport r;
    r.name = "hilbert_lattice";
    const double exponent = rho(m, r_exp, 2.0);
    const BoundReport bound = hilbert_lattice_bound(m, k, r_exp);
    r.parameters = {{"m", m},   {"n", p.dimension()}, {"k", k},
                    {"r", r_exp}, {"rho", exponent},    {"pi_index", bound.parameter("pi_index")}};
    if (v.source().exponent() != 1.0) {
        r.decline("source is not an l_1 model");
        return r;
    }
    const double pi = grothendieck_upper(v);
    r.lhs = vector_lhs(p, v, exponent);
    const double upper = enclosure_upper(TorusPolynomial::from(p), options, v.source(), r.diagnostics);
    r.rhs = bound.value * pi * upper;
    r.tolerance = 0.0;
    r.diagnostics["constant"] = bound.value;
    r.diagnostics["factors"] = factors_json(bound);
    r.diagnostics["pi_upper"] = pi;
    r.decide();
    attach_witness(r, &p, &v);
    return r;
}

CheckReport kahane_empirical(const AtomicFunctionSpace& space, const std::vector<CVector>& xs, double p,
                             std::uint64_t trials, std::uint64_t seed) {
    if (xs.empty()) throw std::invalid_argument("kahane_empirical: empty vector family");
    if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("kahane_empirical: p must lie in [1, 2]");
    if (trials < 2) throw std::invalid_argument("kahane_empirical: needs at least 2 trials");
    const std::size_t d = static_cast<std::size_t>(space.atoms());
    for (const auto& x : xs) {
        if (x.size() != d) throw std::invalid_argument("kahane_empirical: vector dimension mismatch");
    }

    Engine rng = make_engine(seed, {0x6b61686e});
    // running means and co-moments of a = ||S||^2 and b = ||S||^p
    double mean_a = 0.0, mean_b = 0.0, caa = 0.0, cbb = 0.0, cab = 0.0;
    CVector sum(d);
    std::uint64_t bits = 0;
    int left = 0;
    for (std::uint64_t t = 1; t <= trials; ++t) {
        std::fill(sum.begin(), sum.end(), cplx{});
        for (const auto& x : xs) {
            if (left == 0) {
                bits = rng();
                left = 64;
            }
            const double sign = (bits & 1u) ? 1.0 : -1.0;
            bits >>= 1;
            --left;
            for (std::size_t j = 0; j < d; ++j) sum[j] += sign * x[j];
        }
        const double norm = space.norm(sum);
        const double a = norm * norm;
        const double b = p == 2.0 ? a : std::pow(norm, p);
        const double da = a - mean_a;
        const double db = b - mean_b;
        mean_a += da / static_cast<double>(t);
        mean_b += db / static_cast<double>(t);
        caa += da * (a - mean_a);
        cbb += db * (b - mean_b);
        cab += da * (b - mean_b);
    }
    const double N = static_cast<double>(trials);
    const auto root_p = [p](double x) { return p == 2.0 ? std::sqrt(x) : std::pow(x, 1.0 / p); };

    CheckReport r;
    r.name = "kahane";
    r.parameters = {{"atoms", space.atoms()}, {"vectors", xs.size()}, {"p", p}, {"trials", trials}, {"seed", seed}};
    double sigma = 0.0;
    if (mean_b > 0.0) {
        r.lhs = std::sqrt(mean_a) / root_p(mean_b);
        const double ga = r.lhs / (2.0 * mean_a);
        const double gb = -r.lhs / (p * mean_b);
        const double var = (ga * ga * caa + 2.0 * ga * gb * cab + gb * gb * cbb) / (N - 1.0);
        sigma = std::sqrt(std::max(var, 0.0) / N);
    } else {
        r.lhs = 1.0;
    }
    r.rhs = kahane_constant_upper(p);
    r.tolerance = kSigmaTolerance * sigma;
    r.diagnostics["ratio"] = r.lhs;
    r.diagnostics["std_error"] = sigma;
    r.diagnostics["mean_square"] = mean_a;
    r.diagnostics["mean_pth_power"] = mean_b;
    r.diagnostics["ratio_at_least_one"] = r.lhs >= 1.0 - 1e-12;
    r.decide();
    return r;
}

SearchResult lower_bound_search(int m, int n, int budget, std::uint64_t seed, std::uint64_t grid_points) {
    if (m < 1 || n < 1) throw std::invalid_argument("lower_bound_search: m and n must be >= 1");
    if (budget < 1) throw std::invalid_argument("lower_bound_search: budget must be >= 1");
    const double exponent = 2.0 * m / (m + 1.0);
    auto ratio = [&](const HomogeneousPolynomial& p) {
        const TorusPolynomial tp = TorusPolynomial::from(p);
        const double sup = supnorm_upper(tp, auto_grid(tp, grid_points), std::nullopt);
        return sup > 0.0 ? coeff_lp_norm(p, exponent) / sup : 0.0;
    };

    SearchResult out;
    out.m = m;
    out.n = n;
    out.upper = m == 1 ? 1.0 : scalar_bh_best(m).report.value;

    // evaluation 0: the monomial z_0 z_1 ... (indices wrapping mod n)
    std::vector<int> alpha(static_cast<std::size_t>(n), 0);
    for (int j = 0; j < m; ++j) ++alpha[static_cast<std::size_t>(j % n)];
    HomogeneousPolynomial current(n, m, 1);
    current.set(MultiIndex(alpha), 1.0);
    double current_ratio = ratio(current);
    out.best_ratio = current_ratio;
    out.witness = current;
    out.evaluations = 1;

    Engine rng = make_engine(seed, {0x73726368, 0});
    for (int e = 1; e < budget; ++e) {
        const int restart = e / kSearchRestartPeriod;
        const int step = e % kSearchRestartPeriod;
        if (step == 0) {
            rng = make_engine(seed, {0x73726368, static_cast<std::uint64_t>(restart)});
            current = random_polynomial(n, m, 1, CoefficientLaw::steinhaus, rng());
            current_ratio = ratio(current);
        } else {
            HomogeneousPolynomial trial = current;
            const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, trial.term_count() - 1)(rng);
            const double scale = 0.5 * (1.0 - static_cast<double>(step) / kSearchRestartPeriod) + 0.05;
            trial.coefficient(pos)[0] += scale * complex_gaussian(rng);
            const double value = ratio(trial);
            if (value >= current_ratio) {
                current = std::move(trial);
                current_ratio = value;
            }
        }
        ++out.evaluations;
        if (current_ratio > out.best_ratio) {
            out.best_ratio = current_ratio;
            out.witness = current;
        }
    }
    out.gap = out.upper - out.best_ratio;
    out.consistent = out.best_ratio <= out.upper * (1.0 + 1e-6);
    return out;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"blei",      "scalar-bh",       "hypercontractive", "coeff-lemma",
                                                "vector-bh", "multilinear-gt", "hilbert-lattice",  "kahane"};
    return names;
}

int default_trials(std::string_view suite) {
    if (suite == "blei") return 1000;
    if (suite == "scalar-bh") return 200;
    if (suite == "hypercontractive") return 100;
    if (suite == "kahane") return 12;
    for (const auto& name : suite_names()) {
        if (suite == name) return 50;
    }
    throw std::invalid_argument("unknown suite '" + std::string(suite) + "'");
}

namespace {

CVector gaussian_vector(std::size_t size, Engine& rng) {
    CVector out(size);
    for (auto& c : out) c = complex_gaussian(rng);
    return out;
}

LinearOperator random_operator(const AtomicFunctionSpace& source, const AtomicFunctionSpace& target, Engine& rng) {
    return LinearOperator(source, target,
                          gaussian_vector(static_cast<std::size_t>(source.atoms() * target.atoms()), rng));
}

CheckReport run_instance(std::string_view suite, int i, const SuiteConfig& c) {
    Engine rng = make_engine(c.seed, {fnv1a(suite), static_cast<std::uint64_t>(i)});
    const std::uint64_t sub = rng();
    EnclosureOptions enclosure;
    enclosure.budget = c.budget;
    enclosure.grid_points = c.grid_points;
    enclosure.grid = c.grid;
    enclosure.seed = sub;
    const auto l1 = AtomicFunctionSpace::uniform(3, 1.0);
    const auto l2 = AtomicFunctionSpace::uniform(2, 2.0);

    CheckReport r;
    if (suite == "blei") {
        static const double pairs[4][2] = {{1.0, 2.0}, {4.0 / 3.0, 2.0}, {2.0, 2.0}, {1.5, 3.0}};
        const int m = 2 + i % 3;
        const int n = 2 + (i / 3) % 2;
        const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(m));
        const auto& sq = pairs[(i / 6) % 4];
        MultilinearForm a(n, m, 1, gaussian_vector(checked_power(n, m), rng));
        r = check_blei(a, k, sq[0], sq[1]);
    } else if (suite == "scalar-bh") {
        const int m = 1 + i % 4;
        const int n = 1 + (i / 4) % 5;
        r = check_scalar_bh(random_polynomial(n, m, 1, CoefficientLaw::steinhaus, sub), 0, enclosure);
    } else if (suite == "hypercontractive") {
        const int m = 1 + i % 3;
        const int n = 1 + (i / 3) % 3;
        const bool first = (i / 9) % 2 == 0;
        r = check_hypercontractive(random_polynomial(n, m, 1, CoefficientLaw::steinhaus, sub), first ? 1.0 : 2.0,
                                   first ? 2.0 : 4.0, c.samples, rng());
    } else if (suite == "coeff-lemma") {
        static const double variants[4][3] = {{2.0, 2.0, 2.0}, {1.0, 2.0, 2.0}, {1.0, 4.0, 3.0}, {1.5, 3.0, 2.0}};
        const auto& pqe = variants[i % 4];
        const int m = 1 + (i / 4) % 3;
        const int n = 1 + (i / 12) % 3;
        std::uniform_real_distribution<double> w(0.5, 2.0);
        AtomicFunctionSpace x({w(rng), w(rng)}, pqe[2]);
        r = check_coeff_lemma(random_polynomial(n, m, 2, CoefficientLaw::gaussian, sub), x, pqe[0], pqe[1], c.samples,
                              rng());
    } else if (suite == "vector-bh") {
        const int m = 2 + i % 2;
        const int n = 1 + (i / 2) % 3;
        const int k = 1 + (i / 6) % m;
        const auto v = random_operator(l1, l2, rng);
        r = check_vector_bh(random_polynomial(n, m, 3, CoefficientLaw::gaussian, sub), v, 1.0, k, enclosure);
    } else if (suite == "multilinear-gt") {
        const int m = 1 + i % 3;
        const double r_exp = (i / 3) % 2 == 0 ? 1.0 : 1.5;
        const auto y = AtomicFunctionSpace::uniform(2, 1.0);
        const auto v = random_operator(y, l2, rng);
        MultilinearForm t(2, m, 2, gaussian_vector(checked_power(2, m) * 2, rng));
        r = check_multilinear_gt(t, v, r_exp, enclosure);
    } else if (suite == "hilbert-lattice") {
        const int m = 2 + i % 2;
        const int n = 1 + (i / 2) % 3;
        const int k = 1 + (i / 6) % m;
        const double r_exp = (i / 12) % 2 == 0 ? 1.0 : 1.5;
        const auto v = random_operator(l1, l2, rng);
        r = check_hilbert_lattice(random_polynomial(n, m, 3, CoefficientLaw::gaussian, sub), v, r_exp, k, enclosure);
    } else if (suite == "kahane") {
        const int d = 2 << (i % 3);
        const bool basis = (i / 3) % 2 == 0;
        const double p = (i / 6) % 2 == 0 ? 1.0 : 1.5;
        std::vector<CVector> xs;
        for (int j = 0; j < d; ++j) {
            if (basis) {
                CVector e(static_cast<std::size_t>(d));
                e[static_cast<std::size_t>(j)] = 1.0;
                xs.push_back(std::move(e));
            } else {
                xs.push_back(gaussian_vector(static_cast<std::size_t>(d), rng));
            }
        }
        r = kahane_empirical(AtomicFunctionSpace::uniform(d, 2.0), xs, p, c.samples, sub);
        r.parameters["family"] = basis ? "basis" : "gaussian";
    } else {
        throw std::invalid_argument("unknown suite '" + std::string(suite) + "'");
    }
    r.parameters["instance"] = i;
    r.diagnostics["instance_seed"] = sub;
    return r;
}

}  // namespace

std::vector<CheckReport> run_suite(std::string_view suite, const SuiteConfig& config) {
    const int trials = config.trials > 0 ? config.trials : default_trials(suite);
    default_trials(suite);  // rejects unknown names before spawning workers
    std::vector<CheckReport> out(static_cast<std::size_t>(trials));
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers =
        std::min<unsigned>(config.workers > 0 ? static_cast<unsigned>(config.workers) : hw, static_cast<unsigned>(trials));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (int i = next++; i < trials; i = next++) {
            try {
                out[static_cast<std::size_t>(i)] = run_instance(suite, i, config);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace bhl
