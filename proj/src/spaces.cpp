#include "bhl/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "bhl/errors.hpp"
#include "bhl/random.hpp"

namespace bhl {

namespace {

cplx unit_phase(cplx v) {
    const double a = std::abs(v);
    return a > 0.0 ? v / a : cplx{1.0, 0.0};
}

// phi with dual norm 1 and phi(y) = ||y||.
CVector norming_functional(const AtomicFunctionSpace& space, std::span<const cplx> y) {
    const double q = space.exponent();
    const auto& mu = space.weights();
    CVector phi(y.size());
    const double ny = space.norm(y);
    for (std::size_t j = 0; j < y.size(); ++j) {
        const cplx conj_phase = std::conj(unit_phase(y[j]));
        if (q == 1.0) {
            phi[j] = mu[j] * conj_phase;
        } else if (ny > 0.0) {
            phi[j] = mu[j] * std::pow(std::abs(y[j]) / ny, q - 1.0) * conj_phase;
        } else {
            phi[j] = cplx{};
        }
    }
    return phi;
}

cplx apply_functional(std::span<const cplx> phi, std::span<const cplx> x) {
    cplx s{};
    for (std::size_t j = 0; j < x.size(); ++j) s += phi[j] * x[j];
    return s;
}

double sum_of_norms(const AtomicFunctionSpace& space, std::span<const CVector> xs) {
    double s = 0.0;
    for (const auto& x : xs) s += space.norm(x);
    return s;
}

// Grid enclosure of sup_theta ||sum theta_i x_i||. Returns (grid max, upper)
// or nothing when the grid exceeds the budget.
std::optional<std::pair<double, double>> weak_grid_enclosure(const AtomicFunctionSpace& space,
                                                             std::span<const CVector> xs, int phases,
                                                             std::uint64_t budget) {
    const std::size_t count = xs.size();
    if (count == 0) return std::pair{0.0, 0.0};
    // Fix the phase of the largest vector; the norm is invariant under a
    // common rotation.
    std::size_t anchor = 0;
    std::vector<double> norms(count);
    for (std::size_t i = 0; i < count; ++i) {
        norms[i] = space.norm(xs[i]);
        if (norms[i] > norms[anchor]) anchor = i;
    }
    std::uint64_t cells = 1;
    for (std::size_t i = 1; i < count; ++i) {
        if (cells > budget / static_cast<std::uint64_t>(phases)) return std::nullopt;
        cells *= static_cast<std::uint64_t>(phases);
    }
    std::vector<std::size_t> free_ids;
    for (std::size_t i = 0; i < count; ++i) {
        if (i != anchor) free_ids.push_back(i);
    }
    const std::size_t dim = xs[0].size();
    std::vector<cplx> roots(static_cast<std::size_t>(phases));
    for (int g = 0; g < phases; ++g) roots[static_cast<std::size_t>(g)] = std::polar(1.0, 2.0 * std::numbers::pi * g / phases);
    std::vector<int> digit(free_ids.size(), 0);
    CVector y(dim);
    double best = 0.0;
    for (std::uint64_t cell = 0; cell < cells; ++cell) {
        for (std::size_t j = 0; j < dim; ++j) y[j] = xs[anchor][j];
        for (std::size_t f = 0; f < free_ids.size(); ++f) {
            const cplx t = roots[static_cast<std::size_t>(digit[f])];
            const auto& x = xs[free_ids[f]];
            for (std::size_t j = 0; j < dim; ++j) y[j] += t * x[j];
        }
        best = std::max(best, space.norm(y));
        for (std::size_t f = 0; f < digit.size(); ++f) {
            if (++digit[f] < phases) break;
            digit[f] = 0;
        }
    }
    double inflation = 0.0;
    for (std::size_t i : free_ids) inflation += norms[i];
    inflation *= std::numbers::pi / phases;
    return std::pair{best, best + inflation};
}

double weak_ell1_upper(const AtomicFunctionSpace& space, std::span<const CVector> xs, int phases,
                       std::uint64_t budget) {
    double upper = sum_of_norms(space, xs);
    if (auto grid = weak_grid_enclosure(space, xs, phases, budget)) upper = std::min(upper, grid->second);
    return upper;
}

}  // namespace

AtomicFunctionSpace::AtomicFunctionSpace(std::vector<double> weights, double exponent)
    : weights_(std::move(weights)), exponent_(exponent) {
    if (weights_.empty()) throw std::invalid_argument("function space needs at least one atom");
    for (double w : weights_) {
        if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("atom weights must be finite and > 0");
    }
    if (!(exponent_ >= 1.0) || !std::isfinite(exponent_)) {
        throw std::invalid_argument("space exponent must lie in [1, inf)");
    }
}

AtomicFunctionSpace AtomicFunctionSpace::uniform(int atoms, double exponent) {
    if (atoms < 1) throw std::invalid_argument("function space needs at least one atom");
    return AtomicFunctionSpace(std::vector<double>(static_cast<std::size_t>(atoms), 1.0), exponent);
}

double AtomicFunctionSpace::norm(std::span<const cplx> f) const {
    if (f.size() != weights_.size()) {
        throw std::invalid_argument("norm: vector of length " + std::to_string(f.size()) + " on a space with " +
                                    std::to_string(weights_.size()) + " atoms");
    }
    double s = 0.0;
    if (exponent_ == 1.0) {
        for (std::size_t j = 0; j < f.size(); ++j) s += weights_[j] * std::abs(f[j]);
        return s;
    }
    if (exponent_ == 2.0) {
        for (std::size_t j = 0; j < f.size(); ++j) s += weights_[j] * std::norm(f[j]);
        return std::sqrt(s);
    }
    for (std::size_t j = 0; j < f.size(); ++j) s += weights_[j] * std::pow(std::abs(f[j]), exponent_);
    return std::pow(s, 1.0 / exponent_);
}

double AtomicFunctionSpace::dual_norm(std::span<const cplx> phi) const {
    if (phi.size() != weights_.size()) throw std::invalid_argument("dual_norm: dimension mismatch");
    if (exponent_ == 1.0) {
        double m = 0.0;
        for (std::size_t j = 0; j < phi.size(); ++j) m = std::max(m, std::abs(phi[j]) / weights_[j]);
        return m;
    }
    const double qd = exponent_ / (exponent_ - 1.0);
    double s = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) {
        s += std::pow(std::abs(phi[j]) * std::pow(weights_[j], -1.0 / exponent_), qd);
    }
    return std::pow(s, 1.0 / qd);
}

AtomicFunctionSpace pth_power_space(const AtomicFunctionSpace& space, double p) {
    if (!(p >= 1.0 && p <= space.exponent())) {
        throw std::invalid_argument("pth_power_space: p must lie in [1, " + std::to_string(space.exponent()) + "]");
    }
    return AtomicFunctionSpace(space.weights(), space.exponent() / p);
}

std::optional<double> LatticeConstants::concavity(double q_prime) const {
    if (q_prime >= exponent) return 1.0;
    return std::nullopt;
}

std::optional<double> LatticeConstants::convexity(double p) const {
    if (p >= 1.0 && p <= exponent) return 1.0;
    return std::nullopt;
}

LatticeConstants lattice_constants(const AtomicFunctionSpace& space, int trials, std::uint64_t seed) {
    LatticeConstants out;
    out.exponent = space.exponent();
    out.atoms = space.atoms();
    const double q = space.exponent();
    const double d = space.atoms();
    if (space.is_hilbert() || space.atoms() == 1) {
        out.cotype2 = {1.0, 1.0};
        return out;
    }
    // Weighted l_q^d is isometric to l_q^d. For q < 2 the space is 2-concave
    // with constant 1 and the scalar L1-L2 Khintchine constant sqrt(2)
    // applies; comparison with l_2^d gives the dimensional factors.
    out.cotype2.upper = q < 2.0 ? std::min(std::numbers::sqrt2, std::pow(d, 1.0 / q - 0.5)) : std::pow(d, 0.5 - 1.0 / q);

    auto ratio = [&](const std::vector<CVector>& xs) {
        double lhs = 0.0;
        for (const auto& x : xs) lhs += std::pow(space.norm(x), 2.0);
        const std::size_t count = xs.size();
        double mean_sq = 0.0;
        CVector y(xs[0].size());
        const std::uint64_t patterns = std::uint64_t{1} << count;
        for (std::uint64_t s = 0; s < patterns; ++s) {
            std::fill(y.begin(), y.end(), cplx{});
            for (std::size_t i = 0; i < count; ++i) {
                const double sign = (s >> i) & 1u ? -1.0 : 1.0;
                for (std::size_t j = 0; j < y.size(); ++j) y[j] += sign * xs[i][j];
            }
            mean_sq += std::pow(space.norm(y), 2.0);
        }
        mean_sq /= static_cast<double>(patterns);
        return mean_sq > 0.0 ? std::sqrt(lhs / mean_sq) : 0.0;
    };

    double best = 1.0;
    // Walsh rows on the first 2^b atoms, rescaled to the weights.
    int block = 1;
    while (block * 2 <= space.atoms()) block *= 2;
    if (block >= 2) {
        std::vector<CVector> walsh;
        for (int row = 0; row < block; ++row) {
            CVector x(static_cast<std::size_t>(space.atoms()), cplx{});
            for (int j = 0; j < block; ++j) {
                const int parity = __builtin_popcount(static_cast<unsigned>(row & j)) & 1;
                x[static_cast<std::size_t>(j)] =
                    (parity ? -1.0 : 1.0) * std::pow(space.weights()[static_cast<std::size_t>(j)], -1.0 / q);
            }
            walsh.push_back(std::move(x));
            if (walsh.size() >= 2 && walsh.size() <= 10) best = std::max(best, ratio(walsh));
        }
    }
    for (int t = 0; t < trials; ++t) {
        Engine rng = make_engine(seed, {0x636f74u, static_cast<std::uint64_t>(t)});
        const int count = 1 + static_cast<int>(std::uniform_int_distribution<int>(0, 5)(rng));
        std::vector<CVector> xs(static_cast<std::size_t>(count), CVector(static_cast<std::size_t>(space.atoms())));
        for (auto& x : xs) {
            for (auto& c : x) c = complex_gaussian(rng);
        }
        best = std::max(best, ratio(xs));
    }
    out.cotype2.lower = std::min(best, out.cotype2.upper);
    return out;
}

LinearOperator::LinearOperator(AtomicFunctionSpace source, AtomicFunctionSpace target, CVector matrix)
    : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
    const std::size_t expected = static_cast<std::size_t>(source_.atoms()) * static_cast<std::size_t>(target_.atoms());
    if (matrix_.size() != expected) {
        throw std::invalid_argument("operator matrix has " + std::to_string(matrix_.size()) + " entries, expected " +
                                    std::to_string(expected));
    }
    for (cplx v : matrix_) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw std::invalid_argument("operator matrix entries must be finite");
        }
    }
}

LinearOperator LinearOperator::identity(const AtomicFunctionSpace& space) {
    const auto d = static_cast<std::size_t>(space.atoms());
    CVector m(d * d, cplx{});
    for (std::size_t j = 0; j < d; ++j) m[j * d + j] = 1.0;
    return LinearOperator(space, space, std::move(m));
}

LinearOperator LinearOperator::zero(AtomicFunctionSpace source, AtomicFunctionSpace target) {
    CVector m(static_cast<std::size_t>(source.atoms()) * static_cast<std::size_t>(target.atoms()), cplx{});
    return LinearOperator(std::move(source), std::move(target), std::move(m));
}

CVector LinearOperator::apply(std::span<const cplx> x) const {
    if (x.size() != static_cast<std::size_t>(cols())) throw std::invalid_argument("apply: dimension mismatch");
    CVector y(static_cast<std::size_t>(rows()), cplx{});
    for (int r = 0; r < rows(); ++r) {
        cplx s{};
        for (int c = 0; c < cols(); ++c) s += at(r, c) * x[static_cast<std::size_t>(c)];
        y[static_cast<std::size_t>(r)] = s;
    }
    return y;
}

CVector LinearOperator::column(int col) const {
    CVector y(static_cast<std::size_t>(rows()));
    for (int r = 0; r < rows(); ++r) y[static_cast<std::size_t>(r)] = at(r, col);
    return y;
}

std::string_view certificate_name(NormCertificate c) {
    switch (c) {
        case NormCertificate::exact_column_max: return "exact_column_max";
        case NormCertificate::singular_value: return "singular_value";
        case NormCertificate::lower_estimate: return "lower_estimate";
    }
    return "unknown";
}

OperatorNorm operator_norm(const LinearOperator& v, int multistarts, std::uint64_t seed) {
    const auto& src = v.source();
    const auto& tgt = v.target();
    if (src.exponent() == 1.0) {
        double best = 0.0;
        for (int c = 0; c < v.cols(); ++c) {
            best = std::max(best, tgt.norm(v.column(c)) / src.weights()[static_cast<std::size_t>(c)]);
        }
        return {best, NormCertificate::exact_column_max};
    }
    if (src.is_hilbert() && tgt.is_hilbert()) {
        Eigen::MatrixXcd a(v.rows(), v.cols());
        for (int r = 0; r < v.rows(); ++r) {
            for (int c = 0; c < v.cols(); ++c) {
                a(r, c) = v.at(r, c) * std::sqrt(tgt.weights()[static_cast<std::size_t>(r)] /
                                                 src.weights()[static_cast<std::size_t>(c)]);
            }
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
        return {svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0, NormCertificate::singular_value};
    }
    // No closed form: hill-climb from basis vectors and random starts.
    Engine rng = make_engine(seed, {0x6f706eu});
    const auto d = static_cast<std::size_t>(v.cols());
    auto score = [&](const CVector& x) {
        const double nx = src.norm(x);
        return nx > 0.0 ? tgt.norm(v.apply(x)) / nx : 0.0;
    };
    double best = 0.0;
    for (int start = 0; start < multistarts + v.cols(); ++start) {
        CVector x(d, cplx{});
        if (start < v.cols()) {
            x[static_cast<std::size_t>(start)] = 1.0;
        } else {
            for (auto& c : x) c = complex_gaussian(rng);
        }
        double cur = score(x);
        double step = 0.5;
        for (int it = 0; it < 200 && step > 1e-9; ++it) {
            CVector trial = x;
            trial[std::uniform_int_distribution<std::size_t>(0, d - 1)(rng)] += step * complex_gaussian(rng);
            const double s = score(trial);
            if (s > cur) {
                cur = s;
                x = std::move(trial);
            } else {
                step *= 0.9;
            }
        }
        best = std::max(best, cur);
    }
    return {best, NormCertificate::lower_estimate};
}

Interval weak_ell1_norm(const AtomicFunctionSpace& space, std::span<const CVector> xs,
                        const WeakNormOptions& options) {
    if (xs.empty()) throw std::invalid_argument("weak_ell1_norm: empty sequence");
    for (const auto& x : xs) {
        if (x.size() != static_cast<std::size_t>(space.atoms())) {
            throw std::invalid_argument("weak_ell1_norm: vector dimension does not match the space");
        }
    }
    const std::size_t count = xs.size();
    const std::size_t dim = static_cast<std::size_t>(space.atoms());
    Interval out;
    out.upper = sum_of_norms(space, xs);
    if (auto grid = weak_grid_enclosure(space, xs, options.grid_phases, options.grid_budget)) {
        out.lower = grid->first;
        out.upper = std::min(out.upper, grid->second);
    }

    Engine rng = make_engine(options.seed, {0x7765616bu});
    CVector theta(count);
    CVector y(dim);
    for (int start = 0; start < std::max(1, options.multistarts); ++start) {
        for (auto& t : theta) t = start == 0 ? cplx{1.0, 0.0} : steinhaus(rng);
        double prev = -1.0;
        for (int round = 0; round < options.ascent_rounds; ++round) {
            std::fill(y.begin(), y.end(), cplx{});
            for (std::size_t i = 0; i < count; ++i) {
                for (std::size_t j = 0; j < dim; ++j) y[j] += theta[i] * xs[i][j];
            }
            const double value = space.norm(y);
            out.lower = std::max(out.lower, value);
            if (value <= prev * (1.0 + 1e-15)) break;
            prev = value;
            const CVector phi = norming_functional(space, y);
            for (std::size_t i = 0; i < count; ++i) theta[i] = std::conj(unit_phase(apply_functional(phi, xs[i])));
        }
    }
    out.lower = std::min(out.lower, out.upper);
    return out;
}

SummingEstimate summing_norm_lower(const LinearOperator& v, double r, int seq_len_cap, int trials,
                                   std::uint64_t seed) {
    if (!(r >= 1.0)) throw std::invalid_argument("summing_norm_lower: r must be >= 1");
    if (seq_len_cap < 1) throw std::invalid_argument("summing_norm_lower: sequence length cap must be >= 1");
    const auto& src = v.source();
    const auto& tgt = v.target();
    constexpr int kPhases = 16;
    constexpr std::uint64_t kGridBudget = 4096;

    SummingEstimate out;
    out.r = r;
    auto consider = [&](std::span<const CVector> xs) {
        const double weak = weak_ell1_upper(src, xs, kPhases, kGridBudget);
        if (!(weak > 0.0)) return;
        double strong = 0.0;
        for (const auto& x : xs) strong += std::pow(tgt.norm(v.apply(x)), r);
        const double ratio = std::pow(strong, 1.0 / r) / weak;
        if (ratio > out.lower) {
            out.lower = ratio;
            out.witness.assign(xs.begin(), xs.end());
        }
    };

    const auto d = static_cast<std::size_t>(src.atoms());
    for (std::size_t j = 0; j < d; ++j) {
        CVector e(d, cplx{});
        e[j] = 1.0;
        consider(std::span<const CVector>(&e, 1));
    }
    for (int t = 0; t < trials; ++t) {
        Engine rng = make_engine(seed, {0x73756du, static_cast<std::uint64_t>(t)});
        std::vector<CVector> xs;
        for (int len = 1; len <= seq_len_cap; ++len) {
            CVector x(d);
            for (auto& c : x) c = complex_gaussian(rng);
            xs.push_back(std::move(x));
            consider(xs);
        }
    }
    if (src.exponent() == 1.0 && tgt.is_hilbert()) {
        out.upper = grothendieck_upper(v);
    } else if (src.atoms() == 1) {
        // On a one-dimensional source every sequence is a multiple of one
        // vector, so pi_{(r,1)}(v) = ||v||.
        out.upper = operator_norm(v).value;
    }
    return out;
}

double grothendieck_upper(const LinearOperator& v, double grothendieck_constant) {
    if (v.source().exponent() != 1.0) {
        throw std::invalid_argument("grothendieck_upper: source must be an l_1 model (exponent 1)");
    }
    if (!v.target().is_hilbert()) {
        throw std::invalid_argument("grothendieck_upper: target must be a Hilbert model (exponent 2)");
    }
    if (!(grothendieck_constant >= 1.0)) throw std::invalid_argument("grothendieck_upper: constant must be >= 1");
    return grothendieck_constant * operator_norm(v).value;
}

namespace {

nlohmann::ordered_json space_to_json(const AtomicFunctionSpace& s) {
    nlohmann::ordered_json j;
    j["atoms"] = s.atoms();
    j["weights"] = s.weights();
    j["exponent"] = s.exponent();
    return j;
}

AtomicFunctionSpace space_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw ParseError(where, "expected an object");
    if (!j.contains("atoms") || !j.at("atoms").is_number_integer() || j.at("atoms").get<long long>() < 1) {
        throw ParseError(where + ".atoms", "must be a positive integer");
    }
    const int atoms = j.at("atoms").get<int>();
    if (!j.contains("exponent") || !j.at("exponent").is_number()) {
        throw ParseError(where + ".exponent", "must be a number");
    }
    const double exponent = j.at("exponent").get<double>();
    std::vector<double> weights(static_cast<std::size_t>(atoms), 1.0);
    if (j.contains("weights")) {
        const auto& w = j.at("weights");
        if (!w.is_array() || w.size() != static_cast<std::size_t>(atoms)) {
            throw ParseError(where + ".weights", "must be an array of " + std::to_string(atoms) + " numbers");
        }
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (!w[i].is_number()) throw ParseError(where + ".weights[" + std::to_string(i) + "]", "expected a number");
            weights[i] = w[i].get<double>();
        }
    }
    try {
        return AtomicFunctionSpace(std::move(weights), exponent);
    } catch (const std::invalid_argument& e) {
        throw ParseError(where, e.what());
    }
}

}  // namespace

std::string serialize(const LinearOperator& v) {
    nlohmann::ordered_json doc;
    doc["source"] = space_to_json(v.source());
    doc["target"] = space_to_json(v.target());
    auto rows = nlohmann::ordered_json::array();
    for (int r = 0; r < v.rows(); ++r) {
        auto row = nlohmann::ordered_json::array();
        for (int c = 0; c < v.cols(); ++c) row.push_back({v.at(r, c).real(), v.at(r, c).imag()});
        rows.push_back(std::move(row));
    }
    doc["matrix"] = std::move(rows);
    return doc.dump(2) + "\n";
}

LinearOperator parse_operator(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("byte " + std::to_string(e.byte), e.what());
    }
    if (!doc.is_object()) throw ParseError("$", "operator file must be a JSON object");
    if (!doc.contains("source")) throw ParseError("source", "missing required field");
    if (!doc.contains("target")) throw ParseError("target", "missing required field");
    AtomicFunctionSpace source = space_from_json(doc.at("source"), "source");
    AtomicFunctionSpace target = space_from_json(doc.at("target"), "target");
    if (!doc.contains("matrix") || !doc.at("matrix").is_array()) throw ParseError("matrix", "must be an array of rows");
    const auto& rows = doc.at("matrix");
    if (rows.size() != static_cast<std::size_t>(target.atoms())) {
        throw ParseError("matrix", "expected " + std::to_string(target.atoms()) + " rows");
    }
    CVector m;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string rw = "matrix[" + std::to_string(r) + "]";
        if (!rows[r].is_array() || rows[r].size() != static_cast<std::size_t>(source.atoms())) {
            throw ParseError(rw, "expected " + std::to_string(source.atoms()) + " entries");
        }
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            const std::string cw = rw + "[" + std::to_string(c) + "]";
            const auto& e = rows[r][c];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                throw ParseError(cw, "expected [re, im]");
            }
            m.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
    }
    return LinearOperator(std::move(source), std::move(target), std::move(m));
}

}  // namespace bhl
