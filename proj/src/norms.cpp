#include "bhl/norms.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bhl/errors.hpp"
#include "bhl/random.hpp"

namespace bhl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_target(int coeff_dim, const Target& target, const char* who) {
    if (target) {
        if (target->atoms() != coeff_dim) {
            throw std::invalid_argument(std::string(who) + ": target space has " + std::to_string(target->atoms()) +
                                        " atoms but coefficients have dimension " + std::to_string(coeff_dim));
        }
    } else if (coeff_dim != 1) {
        throw std::invalid_argument(std::string(who) + ": vector coefficients of dimension " +
                                    std::to_string(coeff_dim) + " need a target space");
    }
}

std::vector<double> coefficient_norms(const TorusPolynomial& p, const Target& target) {
    std::vector<double> out(p.monomials.size());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = value_norm(p.coefficient(t), target);
    return out;
}

// Per-term phase contribution of variable v and its maximal exponent.
struct VariableSlice {
    std::vector<int> exponent;  // exponent of v in each term (0 if absent)
    int max_exponent = 0;
};

std::vector<VariableSlice> slices(const TorusPolynomial& p) {
    std::vector<VariableSlice> out(static_cast<std::size_t>(p.variables));
    for (auto& s : out) s.exponent.assign(p.monomials.size(), 0);
    for (std::size_t t = 0; t < p.monomials.size(); ++t) {
        for (const auto& [v, e] : p.monomials[t]) {
            auto& s = out[static_cast<std::size_t>(v)];
            s.exponent[t] += e;
            s.max_exponent = std::max(s.max_exponent, s.exponent[t]);
        }
    }
    return out;
}

class PhaseAscent {
public:
    PhaseAscent(const TorusPolynomial& p, const Target& target, const SupnormOptions& options)
        : p_(p), target_(target), options_(options), slices_(slices(p)) {
        const std::size_t d = static_cast<std::size_t>(p.coeff_dim);
        scan_roots_.resize(static_cast<std::size_t>(options.phase_scan));
        for (int s = 0; s < options.phase_scan; ++s) scan_roots_[static_cast<std::size_t>(s)] = kTwoPi * s / options.phase_scan;
        buffer_.resize(d);
    }

    // Runs sweeps from theta in place and returns the final norm.
    double climb(std::vector<double>& theta) {
        double current = norm_at(theta);
        for (int sweep = 0; sweep < options_.max_sweeps; ++sweep) {
            const double before = current;
            for (int v = 0; v < p_.variables; ++v) {
                if (slices_[static_cast<std::size_t>(v)].max_exponent == 0) continue;
                current = std::max(current, optimize_variable(theta, v));
            }
            if (current <= before * (1.0 + 1e-14)) break;
        }
        return std::max(current, norm_at(theta));
    }

    double norm_at(std::span<const double> theta) const {
        return value_norm(p_.evaluate_phases(theta), target_);
    }

private:
    // Best value of ||sum_k Q_k e^{ik phi}|| found for variable v; theta[v] is
    // moved to the maximizer only when it improves on the current phase.
    double optimize_variable(std::vector<double>& theta, int v) {
        const auto& slice = slices_[static_cast<std::size_t>(v)];
        const std::size_t d = static_cast<std::size_t>(p_.coeff_dim);
        const std::size_t K = static_cast<std::size_t>(slice.max_exponent) + 1;
        q_.assign(K * d, cplx{});
        for (std::size_t t = 0; t < p_.monomials.size(); ++t) {
            double phase = 0.0;
            for (const auto& [u, e] : p_.monomials[t]) {
                if (u != v) phase += e * theta[static_cast<std::size_t>(u)];
            }
            const cplx w = std::polar(1.0, phase);
            const auto c = p_.coefficient(t);
            const std::size_t k = static_cast<std::size_t>(slice.exponent[t]);
            for (std::size_t j = 0; j < d; ++j) q_[k * d + j] += c[j] * w;
        }
        auto restricted = [&](double phi) {
            std::fill(buffer_.begin(), buffer_.end(), cplx{});
            for (std::size_t k = 0; k < K; ++k) {
                const cplx w = std::polar(1.0, static_cast<double>(k) * phi);
                for (std::size_t j = 0; j < d; ++j) buffer_[j] += q_[k * d + j] * w;
            }
            return value_norm(buffer_, target_);
        };

        double best_phi = theta[static_cast<std::size_t>(v)];
        double best = restricted(best_phi);
        for (double phi : scan_roots_) {
            const double f = restricted(phi);
            if (f > best) {
                best = f;
                best_phi = phi;
            }
        }
        // golden-section refinement on the bracketing scan cell
        const double h = kTwoPi / options_.phase_scan;
        double a = best_phi - h;
        double b = best_phi + h;
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = b - g * (b - a);
        double x2 = a + g * (b - a);
        double f1 = restricted(x1);
        double f2 = restricted(x2);
        for (int it = 0; it < 60 && b - a > 1e-13; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = restricted(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = restricted(x1);
            }
        }
        if (f1 > best) {
            best = f1;
            best_phi = x1;
        }
        if (f2 > best) {
            best = f2;
            best_phi = x2;
        }
        theta[static_cast<std::size_t>(v)] = std::remainder(best_phi, kTwoPi);
        return best;
    }

    const TorusPolynomial& p_;
    const Target& target_;
    SupnormOptions options_;
    std::vector<VariableSlice> slices_;
    std::vector<double> scan_roots_;
    CVector q_;
    CVector buffer_;
};

struct Moments {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.count == 0) return;
        const double n = static_cast<double>(count + o.count);
        const double delta = o.mean - mean;
        mean += delta * static_cast<double>(o.count) / n;
        m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / n;
        count += o.count;
    }
};

Moments sample_shard(const HomogeneousPolynomial& p, double exponent, std::uint64_t samples, std::uint64_t seed,
                     std::uint64_t shard, const Target& target, bool stratified) {
    Engine rng = make_engine(seed, {0x746f7275, shard});
    const std::size_t n = static_cast<std::size_t>(p.dimension());
    std::vector<std::vector<std::uint64_t>> strata;
    if (stratified) {
        strata.resize(n);
        for (auto& perm : strata) {
            perm.resize(samples);
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
        }
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Moments acc;
    CVector z(n);
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (std::size_t j = 0; j < n; ++j) {
            const double theta = stratified
                                     ? kTwoPi * (static_cast<double>(strata[j][s]) + unit(rng)) / static_cast<double>(samples)
                                     : uniform_phase(rng);
            z[j] = std::polar(1.0, theta);
        }
        acc.add(std::pow(value_norm(evaluate(p, z), target), exponent));
    }
    return acc;
}

}  // namespace

double lp_norm(std::span<const double> x, double p) {
    if (p == 1.0) return std::accumulate(x.begin(), x.end(), 0.0);
    double top = 0.0;
    for (double v : x) top = std::max(top, v);
    if (top == 0.0) return 0.0;
    if (std::isinf(p)) return top;
    // scaled by the maximum so that large exponents stay finite
    double sum = 0.0;
    for (double v : x) sum += std::pow(v / top, p);
    return top * std::pow(sum, 1.0 / p);
}

double value_norm(std::span<const cplx> value, const Target& target) {
    if (target) return target->norm(value);
    if (value.size() != 1) {
        throw std::invalid_argument("value of dimension " + std::to_string(value.size()) + " needs a target space");
    }
    return std::abs(value[0]);
}

double coeff_lp_norm(const HomogeneousPolynomial& p, double exponent, const Target& target) {
    if (!(exponent >= 1.0)) throw std::invalid_argument("coeff_lp_norm: exponent must be >= 1");
    require_target(p.coeff_dim(), target, "coeff_lp_norm");
    std::vector<double> norms(p.term_count());
    for (std::size_t pos = 0; pos < norms.size(); ++pos) norms[pos] = value_norm(p.coefficient(pos), target);
    return lp_norm(norms, exponent);
}

double mixed_norm(const MultilinearForm& a, const SubsetPair& pair, double s, double q) {
    if (a.coeff_dim() != 1) throw std::invalid_argument("mixed_norm: scalar array required");
    if (!(s >= 1.0) || !(s <= q)) throw std::invalid_argument("mixed_norm: requires 1 <= s <= q");
    const int m = a.degree();
    const int n = a.dimension();
    if (pair.universe != m || pair.subset.size() + pair.complement.size() != static_cast<std::size_t>(m)) {
        throw std::invalid_argument("mixed_norm: subset pair does not partition {0, ..., " + std::to_string(m - 1) + "}");
    }
    double top = 0.0;
    for (const cplx& x : a.raw()) top = std::max(top, std::abs(x));
    if (top == 0.0) return 0.0;

    std::vector<double> inner(static_cast<std::size_t>(checked_power(n, static_cast<int>(pair.subset.size()))), 0.0);
    for_each_M(m, n, [&](std::span<const int> i, std::size_t flat) {
        std::size_t key = 0;
        for (int pos : pair.subset) key = key * static_cast<std::size_t>(n) + static_cast<std::size_t>(i[pos]);
        inner[key] += std::pow(std::abs(a.value(flat)[0]) / top, q);
    });
    double outer = 0.0;
    for (double v : inner) outer += std::pow(v, s / q);
    return top * std::pow(outer, 1.0 / s);
}

double array_lp_norm(const MultilinearForm& a, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("array_lp_norm: exponent must be positive");
    std::vector<double> norms;
    norms.reserve(a.raw().size());
    for (const cplx& x : a.raw()) norms.push_back(std::abs(x));
    return lp_norm(norms, p);
}

TorusPolynomial TorusPolynomial::from(const HomogeneousPolynomial& p) {
    TorusPolynomial out;
    out.variables = p.dimension();
    out.coeff_dim = p.coeff_dim();
    std::vector<int> all(static_cast<std::size_t>(p.dimension()));
    std::iota(all.begin(), all.end(), 0);
    out.homogeneous_groups.push_back(std::move(all));
    for (std::size_t pos = 0; pos < p.term_count(); ++pos) {
        const auto c = p.coefficient(pos);
        if (std::all_of(c.begin(), c.end(), [](const cplx& x) { return x == cplx{}; })) continue;
        std::vector<std::pair<int, int>> mono;
        const auto& alpha = p.terms().alpha(pos).exponents;
        for (int v = 0; v < static_cast<int>(alpha.size()); ++v) {
            if (alpha[static_cast<std::size_t>(v)] > 0) mono.emplace_back(v, alpha[static_cast<std::size_t>(v)]);
        }
        out.monomials.push_back(std::move(mono));
        out.coefficients.insert(out.coefficients.end(), c.begin(), c.end());
    }
    return out;
}

TorusPolynomial TorusPolynomial::from(const MultilinearForm& t) {
    TorusPolynomial out;
    const int m = t.degree();
    const int n = t.dimension();
    out.variables = m * n;
    out.coeff_dim = t.coeff_dim();
    for (int k = 0; k < m; ++k) {
        std::vector<int> group(static_cast<std::size_t>(n));
        std::iota(group.begin(), group.end(), k * n);
        out.homogeneous_groups.push_back(std::move(group));
    }
    for_each_M(m, n, [&](std::span<const int> i, std::size_t flat) {
        const auto c = t.value(flat);
        if (std::all_of(c.begin(), c.end(), [](const cplx& x) { return x == cplx{}; })) return;
        std::vector<std::pair<int, int>> mono;
        for (int k = 0; k < m; ++k) mono.emplace_back(k * n + i[k], 1);
        out.monomials.push_back(std::move(mono));
        out.coefficients.insert(out.coefficients.end(), c.begin(), c.end());
    });
    return out;
}

std::span<const cplx> TorusPolynomial::coefficient(std::size_t term) const {
    return std::span<const cplx>(coefficients).subspan(term * static_cast<std::size_t>(coeff_dim),
                                                       static_cast<std::size_t>(coeff_dim));
}

CVector TorusPolynomial::evaluate_phases(std::span<const double> theta) const {
    if (theta.size() != static_cast<std::size_t>(variables)) {
        throw std::invalid_argument("evaluate_phases: expected " + std::to_string(variables) + " phases");
    }
    CVector out(static_cast<std::size_t>(coeff_dim), cplx{});
    for (std::size_t t = 0; t < monomials.size(); ++t) {
        double phase = 0.0;
        for (const auto& [v, e] : monomials[t]) phase += e * theta[static_cast<std::size_t>(v)];
        const cplx w = std::polar(1.0, phase);
        const auto c = coefficient(t);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += c[j] * w;
    }
    return out;
}

double supnorm_lower(const TorusPolynomial& p, int budget, std::uint64_t seed, const Target& target,
                     const SupnormOptions& options) {
    if (budget < 1) throw std::invalid_argument("supnorm_lower: budget must be >= 1");
    if (options.phase_scan < 2) throw std::invalid_argument("supnorm_lower: phase scan needs >= 2 points");
    require_target(p.coeff_dim, target, "supnorm_lower");
    if (p.monomials.empty()) return 0.0;
    PhaseAscent ascent(p, target, options);
    double best = 0.0;
    std::vector<double> theta(static_cast<std::size_t>(p.variables));
    for (int start = 0; start < budget; ++start) {
        if (start == 0) {
            std::fill(theta.begin(), theta.end(), 0.0);
        } else {
            Engine rng = make_engine(seed, {0x73757021, static_cast<std::uint64_t>(start)});
            for (double& t : theta) t = uniform_phase(rng);
        }
        best = std::max(best, ascent.climb(theta));
    }
    // Rounding in an evaluation can exceed sum ||c_t|| by an ulp; the sum
    // bounds the true sup, so clipping keeps the result a lower bound.
    const std::vector<double> cnorm = coefficient_norms(p, target);
    return std::min(best, std::accumulate(cnorm.begin(), cnorm.end(), 0.0));
}

double supnorm_lower(const HomogeneousPolynomial& p, int budget, std::uint64_t seed, const Target& target) {
    return supnorm_lower(TorusPolynomial::from(p), budget, seed, target);
}

std::vector<int> free_axes(const TorusPolynomial& p) {
    const std::size_t nv = static_cast<std::size_t>(p.variables);
    std::vector<bool> fixed(nv, true);
    for (std::size_t t = 0; t < p.monomials.size(); ++t) {
        const auto c = p.coefficient(t);
        if (std::all_of(c.begin(), c.end(), [](const cplx& x) { return x == cplx{}; })) continue;
        for (const auto& [v, e] : p.monomials[t]) {
            if (e != 0) fixed[static_cast<std::size_t>(v)] = false;
        }
    }
    // A common rotation of a homogeneous group only multiplies P by a
    // unimodular scalar, so one active variable per group can sit at phase 0.
    for (const auto& group : p.homogeneous_groups) {
        int degree = -1;
        bool homogeneous = true;
        for (const auto& mono : p.monomials) {
            int d = 0;
            for (const auto& [v, e] : mono) {
                if (std::find(group.begin(), group.end(), v) != group.end()) d += e;
            }
            if (degree < 0) degree = d;
            homogeneous = homogeneous && d == degree;
        }
        if (!homogeneous) continue;
        for (int v : group) {
            if (!fixed[static_cast<std::size_t>(v)]) {
                fixed[static_cast<std::size_t>(v)] = true;
                break;
            }
        }
    }
    std::vector<int> out;
    for (std::size_t v = 0; v < nv; ++v) {
        if (!fixed[v]) out.push_back(static_cast<int>(v));
    }
    return out;
}

double supnorm_upper(const TorusPolynomial& p, int grid_per_axis, const Target& target) {
    if (grid_per_axis < 1) throw std::invalid_argument("supnorm_upper: grid_per_axis must be >= 1");
    require_target(p.coeff_dim, target, "supnorm_upper");
    if (p.monomials.empty()) return 0.0;
    const std::vector<double> cnorm = coefficient_norms(p, target);
    const double coefficient_sum = std::accumulate(cnorm.begin(), cnorm.end(), 0.0);

    // L_v = sum_t e_tv ||c_t|| bounds |d/dtheta_v| of the norm.
    const std::size_t nv = static_cast<std::size_t>(p.variables);
    std::vector<double> lipschitz(nv, 0.0);
    for (std::size_t t = 0; t < p.monomials.size(); ++t) {
        for (const auto& [v, e] : p.monomials[t]) lipschitz[static_cast<std::size_t>(v)] += e * cnorm[t];
    }
    const std::vector<int> free_vars = free_axes(p);
    double inflation_rate = 0.0;
    for (int v : free_vars) inflation_rate += lipschitz[static_cast<std::size_t>(v)];
    if (free_vars.empty()) {
        return std::min(coefficient_sum, value_norm(p.evaluate_phases(std::vector<double>(nv, 0.0)), target));
    }

    const std::uint64_t G = static_cast<std::uint64_t>(grid_per_axis);
    std::uint64_t points = 1;
    for (std::size_t k = 0; k < free_vars.size(); ++k) {
        if (points > kMaxGridPoints / G) {
            throw ComplexityError("supnorm_upper: grid of " + std::to_string(grid_per_axis) + "^" +
                                  std::to_string(free_vars.size()) + " points exceeds the limit of " +
                                  std::to_string(kMaxGridPoints));
        }
        points *= G;
    }

    CVector roots(G);
    for (std::uint64_t k = 0; k < G; ++k) roots[k] = std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(G));
    // exponent of each free variable in each term, reduced mod G
    const std::size_t T = p.monomials.size();
    std::vector<std::vector<std::uint64_t>> step(free_vars.size(), std::vector<std::uint64_t>(T, 0));
    for (std::size_t t = 0; t < T; ++t) {
        for (const auto& [v, e] : p.monomials[t]) {
            const auto it = std::find(free_vars.begin(), free_vars.end(), v);
            if (it != free_vars.end()) {
                auto& s = step[static_cast<std::size_t>(it - free_vars.begin())][t];
                s = (s + static_cast<std::uint64_t>(e)) % G;
            }
        }
    }
    std::vector<std::uint64_t> index(T, 0);
    std::vector<std::uint64_t> odometer(free_vars.size(), 0);
    CVector value(static_cast<std::size_t>(p.coeff_dim));
    const std::size_t d = value.size();
    double grid_max = 0.0;
    for (std::uint64_t point = 0; point < points; ++point) {
        std::fill(value.begin(), value.end(), cplx{});
        for (std::size_t t = 0; t < T; ++t) {
            const cplx w = roots[index[t]];
            const cplx* c = p.coefficients.data() + t * d;
            for (std::size_t j = 0; j < d; ++j) value[j] += c[j] * w;
        }
        grid_max = std::max(grid_max, value_norm(value, target));
        // advance the odometer, last free variable fastest
        for (std::size_t k = free_vars.size(); k-- > 0;) {
            const auto& s = step[k];
            if (++odometer[k] < G) {
                for (std::size_t t = 0; t < T; ++t) index[t] = (index[t] + s[t]) % G;
                break;
            }
            // wrapping from G - 1 to 0 removes (G - 1) * s, i.e. adds s mod G
            odometer[k] = 0;
            for (std::size_t t = 0; t < T; ++t) index[t] = (index[t] + s[t]) % G;
        }
    }
    const double h = kTwoPi / static_cast<double>(G);
    return std::min(coefficient_sum, grid_max + 0.5 * h * inflation_rate);
}

double supnorm_upper(const HomogeneousPolynomial& p, int grid_per_axis, const Target& target) {
    return supnorm_upper(TorusPolynomial::from(p), grid_per_axis, target);
}

Enclosure supnorm_enclosure(const HomogeneousPolynomial& p, int budget, int grid_per_axis, std::uint64_t seed,
                            const Target& target) {
    const TorusPolynomial tp = TorusPolynomial::from(p);
    Enclosure e;
    e.lower = supnorm_lower(tp, budget, seed, target);
    e.upper = supnorm_upper(tp, grid_per_axis, target);
    e.method = "phase-ascent/grid-" + std::to_string(grid_per_axis);
    e.budget = static_cast<std::uint64_t>(budget);
    return e;
}

MonteCarloEstimate torus_lp_norm(const HomogeneousPolynomial& p, double exponent, std::uint64_t samples,
                                 std::uint64_t seed, const Target& target, const SamplingOptions& options) {
    if (!(exponent > 0.0)) throw std::invalid_argument("torus_lp_norm: exponent must be positive");
    if (samples < 2) throw std::invalid_argument("torus_lp_norm: needs at least 2 samples");
    if (options.shards < 1) throw std::invalid_argument("torus_lp_norm: shards must be >= 1");
    require_target(p.coeff_dim(), target, "torus_lp_norm");

    const std::uint64_t shards = std::min<std::uint64_t>(static_cast<std::uint64_t>(options.shards), samples);
    std::vector<std::future<Moments>> work;
    work.reserve(shards);
    for (std::uint64_t s = 0; s < shards; ++s) {
        const std::uint64_t count = samples / shards + (s < samples % shards ? 1 : 0);
        const auto policy = shards > 1 ? std::launch::async : std::launch::deferred;
        work.push_back(std::async(policy, sample_shard, std::cref(p), exponent, count, seed, s, std::cref(target),
                                  options.stratified));
    }
    Moments total;
    for (auto& w : work) total.merge(w.get());

    MonteCarloEstimate out;
    out.samples = total.count;
    out.moment = total.mean;
    const double variance = total.count > 1 ? total.m2 / static_cast<double>(total.count - 1) : 0.0;
    out.moment_std_error = std::sqrt(variance / static_cast<double>(total.count));
    out.estimate = std::pow(out.moment, 1.0 / exponent);
    out.std_error = out.moment > 0.0 ? out.estimate / (exponent * out.moment) * out.moment_std_error : 0.0;
    return out;
}

double exact_l2_torus(const HomogeneousPolynomial& p, const Target& target) {
    require_target(p.coeff_dim(), target, "exact_l2_torus");
    if (!target) return coeff_lp_norm(p, 2.0);
    const std::size_t d = static_cast<std::size_t>(p.coeff_dim());
    std::vector<double> energy(d, 0.0);
    for (std::size_t pos = 0; pos < p.term_count(); ++pos) {
        const auto c = p.coefficient(pos);
        for (std::size_t j = 0; j < d; ++j) energy[j] += std::norm(c[j]);
    }
    CVector aggregate(d);
    for (std::size_t j = 0; j < d; ++j) aggregate[j] = std::sqrt(energy[j]);
    return target->norm(aggregate);
}

}  // namespace bhl
