#include "bhl/polynomial.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "bhl/errors.hpp"
#include "bhl/random.hpp"

namespace bhl {

namespace {

void require_shape(int n, int m, int coeff_dim) {
    if (n < 1) throw std::invalid_argument("polynomial dimension n must be >= 1");
    if (m < 1) throw std::invalid_argument("polynomial degree m must be >= 1");
    if (coeff_dim < 1) throw std::invalid_argument("coeff_dim must be >= 1");
}

void guard_full_expansion(int m, int n) {
    std::uint64_t total = 0;
    try {
        total = checked_power(n, m);
    } catch (const std::overflow_error&) {
        total = kMaxFullExpansion + 1;
    }
    if (total > kMaxFullExpansion) {
        throw ComplexityError("n^m = " + std::to_string(n) + "^" + std::to_string(m) + " exceeds the limit of " +
                              std::to_string(kMaxFullExpansion) + " terms");
    }
}

}  // namespace

TermIndex::TermIndex(int m, int n) : m_(m), n_(n), tuples_(enumerate_J(m, n)) {
    alphas_.reserve(tuples_.size());
    multiplicities_.reserve(tuples_.size());
    for (const auto& t : tuples_) {
        alphas_.push_back(alpha_of(t));
        multiplicities_.push_back(bhl::multiplicity(alphas_.back()));
    }
}

std::size_t TermIndex::position(const MultiIndex& alpha) const {
    if (alpha.dimension() != n_) {
        throw std::invalid_argument("multi-index has dimension " + std::to_string(alpha.dimension()) + ", expected " +
                                    std::to_string(n_));
    }
    if (alpha.degree() != m_) {
        throw std::invalid_argument("multi-index has degree " + std::to_string(alpha.degree()) + ", expected " +
                                    std::to_string(m_));
    }
    return rank_J(tuple_of(alpha));
}

std::shared_ptr<const TermIndex> TermIndex::get(int m, int n) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const TermIndex>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{m, n}];
    if (!slot) slot = std::make_shared<const TermIndex>(m, n);
    return slot;
}

HomogeneousPolynomial::HomogeneousPolynomial(int n, int m, int coeff_dim) : coeff_dim_(coeff_dim) {
    require_shape(n, m, coeff_dim);
    index_ = TermIndex::get(m, n);
    coeffs_.assign(index_->size() * static_cast<std::size_t>(coeff_dim), cplx{});
}

HomogeneousPolynomial::HomogeneousPolynomial(int n, int m, int coeff_dim, CVector coefficients)
    : HomogeneousPolynomial(n, m, coeff_dim) {
    if (coefficients.size() != coeffs_.size()) {
        throw std::invalid_argument("expected " + std::to_string(coeffs_.size()) + " coefficient entries, got " +
                                    std::to_string(coefficients.size()));
    }
    coeffs_ = std::move(coefficients);
}

std::span<const cplx> HomogeneousPolynomial::coefficient(std::size_t pos) const {
    return std::span<const cplx>(coeffs_).subspan(pos * static_cast<std::size_t>(coeff_dim_),
                                                  static_cast<std::size_t>(coeff_dim_));
}

std::span<cplx> HomogeneousPolynomial::coefficient(std::size_t pos) {
    return std::span<cplx>(coeffs_).subspan(pos * static_cast<std::size_t>(coeff_dim_),
                                            static_cast<std::size_t>(coeff_dim_));
}

HomogeneousPolynomial& HomogeneousPolynomial::set(const MultiIndex& alpha, cplx value) {
    if (coeff_dim_ != 1) throw std::invalid_argument("set() is for scalar polynomials");
    coefficient(alpha)[0] = value;
    return *this;
}

SymmetricForm::SymmetricForm(int n, int m, int coeff_dim) : coeff_dim_(coeff_dim) {
    require_shape(n, m, coeff_dim);
    index_ = TermIndex::get(m, n);
    values_.assign(index_->size() * static_cast<std::size_t>(coeff_dim), cplx{});
}

SymmetricForm::SymmetricForm(int n, int m, int coeff_dim, CVector values) : SymmetricForm(n, m, coeff_dim) {
    if (values.size() != values_.size()) {
        throw std::invalid_argument("expected " + std::to_string(values_.size()) + " form entries, got " +
                                    std::to_string(values.size()));
    }
    values_ = std::move(values);
}

std::span<const cplx> SymmetricForm::value(std::size_t pos) const {
    return std::span<const cplx>(values_).subspan(pos * static_cast<std::size_t>(coeff_dim_),
                                                  static_cast<std::size_t>(coeff_dim_));
}

std::span<cplx> SymmetricForm::value(std::size_t pos) {
    return std::span<cplx>(values_).subspan(pos * static_cast<std::size_t>(coeff_dim_),
                                            static_cast<std::size_t>(coeff_dim_));
}

MultilinearForm::MultilinearForm(int n, int m, int coeff_dim) : n_(n), m_(m), coeff_dim_(coeff_dim) {
    require_shape(n, m, coeff_dim);
    guard_full_expansion(m, n);
    entries_ = static_cast<std::size_t>(checked_power(n, m));
    values_.assign(entries_ * static_cast<std::size_t>(coeff_dim), cplx{});
}

MultilinearForm::MultilinearForm(int n, int m, int coeff_dim, CVector values) : MultilinearForm(n, m, coeff_dim) {
    if (values.size() != values_.size()) {
        throw std::invalid_argument("expected " + std::to_string(values_.size()) + " array entries, got " +
                                    std::to_string(values.size()));
    }
    values_ = std::move(values);
}

MultilinearForm MultilinearForm::from_symmetric(const SymmetricForm& form) {
    MultilinearForm out(form.dimension(), form.degree(), form.coeff_dim());
    IndexTuple sorted;
    sorted.n = form.dimension();
    sorted.entries.resize(static_cast<std::size_t>(form.degree()));
    for_each_M(form.degree(), form.dimension(), [&](std::span<const int> i, std::size_t flat) {
        std::copy(i.begin(), i.end(), sorted.entries.begin());
        std::sort(sorted.entries.begin(), sorted.entries.end());
        const auto a = form.value(rank_J(sorted));
        std::copy(a.begin(), a.end(), out.value(flat).begin());
    });
    return out;
}

std::size_t MultilinearForm::offset(std::span<const int> i) const {
    if (i.size() != static_cast<std::size_t>(m_)) throw std::invalid_argument("offset: wrong tuple length");
    std::size_t flat = 0;
    for (int v : i) {
        if (v < 0 || v >= n_) throw std::out_of_range("offset: index outside [0, n)");
        flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v);
    }
    return flat;
}

std::span<const cplx> MultilinearForm::value(std::size_t flat) const {
    return std::span<const cplx>(values_).subspan(flat * static_cast<std::size_t>(coeff_dim_),
                                                  static_cast<std::size_t>(coeff_dim_));
}

std::span<cplx> MultilinearForm::value(std::size_t flat) {
    return std::span<cplx>(values_).subspan(flat * static_cast<std::size_t>(coeff_dim_),
                                            static_cast<std::size_t>(coeff_dim_));
}

CVector evaluate(const HomogeneousPolynomial& p, std::span<const cplx> z) {
    if (z.size() != static_cast<std::size_t>(p.dimension())) {
        throw std::invalid_argument("evaluate: point has dimension " + std::to_string(z.size()) + ", expected " +
                                    std::to_string(p.dimension()));
    }
    CVector out(static_cast<std::size_t>(p.coeff_dim()), cplx{});
    const TermIndex& terms = p.terms();
    for (std::size_t pos = 0; pos < terms.size(); ++pos) {
        cplx mono{1.0, 0.0};
        for (int v : terms.tuple(pos).entries) mono *= z[static_cast<std::size_t>(v)];
        const auto c = p.coefficient(pos);
        for (std::size_t d = 0; d < out.size(); ++d) out[d] += c[d] * mono;
    }
    return out;
}

SymmetricForm polarize(const HomogeneousPolynomial& p) {
    SymmetricForm out(p.dimension(), p.degree(), p.coeff_dim());
    for (std::size_t pos = 0; pos < p.term_count(); ++pos) {
        const double mult = static_cast<double>(p.terms().multiplicity(pos));
        const auto c = p.coefficient(pos);
        auto a = out.value(pos);
        for (std::size_t d = 0; d < c.size(); ++d) a[d] = c[d] / mult;
    }
    return out;
}

HomogeneousPolynomial depolarize(const SymmetricForm& form) {
    HomogeneousPolynomial out(form.dimension(), form.degree(), form.coeff_dim());
    for (std::size_t pos = 0; pos < form.term_count(); ++pos) {
        const double mult = static_cast<double>(form.terms().multiplicity(pos));
        const auto a = form.value(pos);
        auto c = out.coefficient(pos);
        for (std::size_t d = 0; d < a.size(); ++d) c[d] = a[d] * mult;
    }
    return out;
}

CVector evaluate_form(const SymmetricForm& form, std::span<const CVector> w) {
    const int m = form.degree();
    const int n = form.dimension();
    if (w.size() != static_cast<std::size_t>(m)) {
        throw std::invalid_argument("evaluate_form: expected " + std::to_string(m) + " arguments, got " +
                                    std::to_string(w.size()));
    }
    for (const auto& arg : w) {
        if (arg.size() != static_cast<std::size_t>(n)) {
            throw std::invalid_argument("evaluate_form: argument of dimension " + std::to_string(arg.size()) +
                                        ", expected " + std::to_string(n));
        }
    }
    guard_full_expansion(m, n);
    CVector out(static_cast<std::size_t>(form.coeff_dim()), cplx{});
    IndexTuple sorted;
    sorted.n = n;
    sorted.entries.resize(static_cast<std::size_t>(m));
    for_each_M(m, n, [&](std::span<const int> i, std::size_t) {
        cplx weight{1.0, 0.0};
        for (int k = 0; k < m; ++k) weight *= w[static_cast<std::size_t>(k)][static_cast<std::size_t>(i[k])];
        if (weight == cplx{}) return;
        std::copy(i.begin(), i.end(), sorted.entries.begin());
        std::sort(sorted.entries.begin(), sorted.entries.end());
        const auto a = form.value(rank_J(sorted));
        for (std::size_t d = 0; d < out.size(); ++d) out[d] += a[d] * weight;
    });
    return out;
}

SymmetricForm partial_apply(const SymmetricForm& form, const SubsetPair& pair, std::span<const cplx> fixed) {
    const int m = form.degree();
    const int n = form.dimension();
    if (pair.universe != m) {
        throw std::invalid_argument("partial_apply: subset universe " + std::to_string(pair.universe) +
                                    " does not match degree " + std::to_string(m));
    }
    if (fixed.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("partial_apply: fixed vector has the wrong dimension");
    }
    const int k = static_cast<int>(pair.subset.size());
    if (k < 1) throw std::invalid_argument("partial_apply: at least one free argument is required");
    if (k == m) return form;
    const int rest = m - k;
    guard_full_expansion(rest, n);

    SymmetricForm out(n, k, form.coeff_dim());
    IndexTuple merged;
    merged.n = n;
    merged.entries.resize(static_cast<std::size_t>(m));
    for (std::size_t pos = 0; pos < out.term_count(); ++pos) {
        const auto& head = out.terms().tuple(pos).entries;
        auto target = out.value(pos);
        for_each_M(rest, n, [&](std::span<const int> tail, std::size_t) {
            cplx weight{1.0, 0.0};
            for (int v : tail) weight *= fixed[static_cast<std::size_t>(v)];
            if (weight == cplx{}) return;
            std::copy(head.begin(), head.end(), merged.entries.begin());
            std::copy(tail.begin(), tail.end(), merged.entries.begin() + k);
            std::sort(merged.entries.begin(), merged.entries.end());
            const auto a = form.value(rank_J(merged));
            for (std::size_t d = 0; d < target.size(); ++d) target[d] += a[d] * weight;
        });
    }
    return out;
}

CoefficientLaw parse_law(std::string_view name) {
    if (name == "steinhaus") return CoefficientLaw::steinhaus;
    if (name == "gaussian") return CoefficientLaw::gaussian;
    if (name == "unimodular-sparse") return CoefficientLaw::unimodular_sparse;
    throw std::invalid_argument("unknown coefficient law '" + std::string(name) +
                                "' (expected steinhaus, gaussian or unimodular-sparse)");
}

std::string_view law_name(CoefficientLaw law) {
    switch (law) {
        case CoefficientLaw::steinhaus: return "steinhaus";
        case CoefficientLaw::gaussian: return "gaussian";
        case CoefficientLaw::unimodular_sparse: return "unimodular-sparse";
    }
    return "unknown";
}

HomogeneousPolynomial random_polynomial(int n, int m, int coeff_dim, CoefficientLaw law, std::uint64_t seed) {
    HomogeneousPolynomial out(n, m, coeff_dim);
    Engine rng = make_engine(seed, {0x706f6c79u});
    CVector values(out.raw().size());
    for (auto& c : values) {
        switch (law) {
            case CoefficientLaw::steinhaus: c = steinhaus(rng); break;
            case CoefficientLaw::gaussian: c = complex_gaussian(rng); break;
            case CoefficientLaw::unimodular_sparse: {
                const bool keep = std::bernoulli_distribution(0.5)(rng);
                const cplx s = steinhaus(rng);
                c = keep ? s : cplx{};
                break;
            }
        }
    }
    return HomogeneousPolynomial(n, m, coeff_dim, std::move(values));
}

std::string serialize(const HomogeneousPolynomial& p) {
    nlohmann::ordered_json doc;
    doc["n"] = p.dimension();
    doc["m"] = p.degree();
    doc["coeff_dim"] = p.coeff_dim();
    auto coefficients = nlohmann::ordered_json::array();
    for (std::size_t pos = 0; pos < p.term_count(); ++pos) {
        const auto c = p.coefficient(pos);
        if (std::all_of(c.begin(), c.end(), [](cplx v) { return v == cplx{}; })) continue;
        nlohmann::ordered_json entry;
        entry["alpha"] = p.terms().alpha(pos).exponents;
        auto value = nlohmann::ordered_json::array();
        for (cplx v : c) value.push_back({v.real(), v.imag()});
        entry["value"] = std::move(value);
        coefficients.push_back(std::move(entry));
    }
    doc["coefficients"] = std::move(coefficients);
    return doc.dump(2) + "\n";
}

namespace {

int read_positive_int(const nlohmann::json& doc, const char* key) {
    if (!doc.contains(key)) throw ParseError(key, "missing required field");
    const auto& v = doc.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1) throw ParseError(key, "must be a positive integer");
    return v.get<int>();
}

double read_number(const nlohmann::json& v, const std::string& where) {
    if (!v.is_number()) throw ParseError(where, "expected a number");
    return v.get<double>();
}

}  // namespace

HomogeneousPolynomial parse_polynomial(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("byte " + std::to_string(e.byte), e.what());
    }
    if (!doc.is_object()) throw ParseError("$", "polynomial file must be a JSON object");
    const int n = read_positive_int(doc, "n");
    const int m = read_positive_int(doc, "m");
    const int coeff_dim = doc.contains("coeff_dim") ? read_positive_int(doc, "coeff_dim") : 1;
    HomogeneousPolynomial out(n, m, coeff_dim);
    if (!doc.contains("coefficients")) return out;
    const auto& list = doc.at("coefficients");
    if (!list.is_array()) throw ParseError("coefficients", "must be an array");
    std::vector<bool> seen(out.term_count(), false);
    for (std::size_t e = 0; e < list.size(); ++e) {
        const std::string where = "coefficients[" + std::to_string(e) + "]";
        const auto& entry = list[e];
        if (!entry.is_object() || !entry.contains("alpha") || !entry.contains("value")) {
            throw ParseError(where, "expected an object with 'alpha' and 'value'");
        }
        const auto& alpha_json = entry.at("alpha");
        if (!alpha_json.is_array() || alpha_json.size() != static_cast<std::size_t>(n)) {
            throw ParseError(where + ".alpha", "must be an array of " + std::to_string(n) + " exponents");
        }
        std::vector<int> exps;
        for (std::size_t j = 0; j < alpha_json.size(); ++j) {
            const auto& x = alpha_json[j];
            if (!x.is_number_integer() || x.get<long long>() < 0) {
                throw ParseError(where + ".alpha[" + std::to_string(j) + "]", "must be a nonnegative integer");
            }
            exps.push_back(x.get<int>());
        }
        MultiIndex alpha(std::move(exps));
        if (alpha.degree() != m) {
            throw ParseError(where + ".alpha",
                             "|alpha| = " + std::to_string(alpha.degree()) + " but m = " + std::to_string(m));
        }
        const std::size_t pos = out.terms().position(alpha);
        if (seen[pos]) throw ParseError(where + ".alpha", "duplicate multi-index");
        seen[pos] = true;
        const auto& value = entry.at("value");
        if (!value.is_array() || value.size() != static_cast<std::size_t>(coeff_dim)) {
            throw ParseError(where + ".value", "must hold " + std::to_string(coeff_dim) + " [re, im] pairs");
        }
        auto c = out.coefficient(pos);
        for (std::size_t d = 0; d < value.size(); ++d) {
            const std::string vw = where + ".value[" + std::to_string(d) + "]";
            const auto& pairv = value[d];
            if (!pairv.is_array() || pairv.size() != 2) throw ParseError(vw, "expected [re, im]");
            c[d] = cplx(read_number(pairv[0], vw + "[0]"), read_number(pairv[1], vw + "[1]"));
        }
    }
    return out;
}

}  // namespace bhl
