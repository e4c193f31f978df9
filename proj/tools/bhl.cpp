// bhl: constants tables, verification suites, envelope scans and
// lower-bound search from the command line.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bhl/constants.hpp"
#include "bhl/errors.hpp"
#include "bhl/norms.hpp"
#include "bhl/polynomial.hpp"
#include "bhl/spaces.hpp"
#include "bhl/verification.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Range {
    int lo = 1;
    int hi = 0;
};

int parse_int(std::string_view s, std::string_view what) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw UsageError("bad " + std::string(what) + " '" + std::string(s) + "'");
    }
    return value;
}

// "a..b" or a single integer; b < a is a valid empty range.
Range parse_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const int v = parse_int(text, "range");
        return {v, v};
    }
    return {parse_int(std::string_view(text).substr(0, dots), "range start"),
            parse_int(std::string_view(text).substr(dots + 2), "range end")};
}

std::string number(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw UsageError("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

ordered_json metadata(const std::string& command, const ordered_json& config) {
    ordered_json meta;
    meta["tool"] = "bhl";
    meta["version"] = BHL_VERSION;
    meta["command"] = command;
    meta["config"] = config;
    return meta;
}

void csv_preamble(std::ostream& os, const ordered_json& meta) {
    os << "# tool=" << meta["tool"].get<std::string>() << " version=" << meta["version"].get<std::string>()
       << " command=" << meta["command"].get<std::string>() << "\n";
    os << "# config=" << meta["config"].dump() << "\n";
}

struct Common {
    std::uint64_t seed = 1;
    std::string format = "csv";
    std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool with_seed) {
    if (with_seed) cmd->add_option("--seed", c.seed, "64-bit seed of every random stream")->capture_default_str();
    cmd->add_option("--format", c.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", c.out, "output file (default: stdout)");
}

int cmd_constants(const std::string& m_text, double r, double t, std::optional<int> k, const Common& c) {
    const Range range = parse_range(m_text);
    if (range.lo < 1) throw UsageError("m must be >= 1");
    if (!(r >= 1.0 && r < 2.0)) throw UsageError("--r must lie in [1, 2)");
    if (!(t >= 1.0 && t < 2.0)) throw UsageError("--t must lie in [1, 2)");
    ordered_json config{{"m", m_text}, {"r", r}, {"t", t}};
    if (k) config["k"] = *k;

    struct Row {
        int m, k_star, k_used;
        double hyper, best, multilinear, rho_value, s_value;
        std::optional<double> at_k;
    };
    std::vector<Row> rows;
    for (int m = range.lo; m <= range.hi; ++m) {
        Row row{};
        row.m = m;
        row.hyper = bhl::hypercontractive_bound(m);
        if (m == 1) {
            row.best = 1.0;
            row.k_star = 1;
        } else {
            const auto best = bhl::scalar_bh_best(m);
            row.best = best.report.value;
            row.k_star = best.k;
        }
        row.k_used = k ? *k : row.k_star;
        if (k && (*k < 1 || *k > m)) throw UsageError("--k must lie in [1, m] for every m of the range");
        if (k && m >= 2 && *k <= m - 1) row.at_k = bhl::scalar_bh_bound(m, *k).value;
        row.multilinear = bhl::bh_multilinear_constant(m, t);
        row.rho_value = bhl::rho(m, r, 2.0);
        row.s_value = bhl::s_k(row.k_used, r);
        rows.push_back(row);
    }

    Output out(c.out);
    std::ostream& os = out.stream();
    const ordered_json meta = metadata("constants", config);
    if (c.format == "json") {
        ordered_json doc = meta;
        doc["rows"] = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json j{{"m", row.m},
                           {"hypercontractive_bound", row.hyper},
                           {"scalar_bh_best", row.best},
                           {"k_star", row.k_star},
                           {"bh_multilinear_constant", row.multilinear},
                           {"rho", row.rho_value},
                           {"k", row.k_used},
                           {"s_k", row.s_value}};
            if (row.at_k) j["scalar_bh_bound_k"] = *row.at_k;
            doc["rows"].push_back(std::move(j));
        }
        os << doc.dump(2) << "\n";
    } else {
        csv_preamble(os, meta);
        os << "m,hypercontractive_bound,scalar_bh_best,k_star,bh_multilinear_constant,rho,k,s_k"
           << (k ? ",scalar_bh_bound_k" : "") << "\n";
        for (const auto& row : rows) {
            os << row.m << "," << number(row.hyper) << "," << number(row.best) << "," << row.k_star << ","
               << number(row.multilinear) << "," << number(row.rho_value) << "," << row.k_used << ","
               << number(row.s_value);
            if (k) os << "," << (row.at_k ? number(*row.at_k) : "");
            os << "\n";
        }
    }
    return kExitPass;
}

void write_witnesses(const std::string& dir, const std::string& suite, const bhl::CheckReport& r,
                     const ordered_json& config) {
    if (r.witness.empty()) return;
    std::filesystem::create_directories(dir);
    const std::string stem = dir + "/" + suite + "-" + std::to_string(r.parameters.value("instance", 0));
    for (const auto& [suffix, content] : r.witness) {
        std::ofstream(stem + "-" + suffix) << content << "\n";
    }
    ordered_json replay = metadata("verify", config);
    replay["report"] = bhl::to_json(r);
    std::ofstream(stem + "-report.json") << replay.dump(2) << "\n";
}

int cmd_verify(const std::string& suite, bhl::SuiteConfig sc, const std::string& witness_dir, const Common& c) {
    sc.seed = c.seed;
    try {
        bhl::default_trials(suite);
    } catch (const std::invalid_argument&) {
        throw UsageError("unknown suite '" + suite + "'");
    }
    const int trials = sc.trials > 0 ? sc.trials : bhl::default_trials(suite);
    ordered_json config{{"suite", suite},        {"seed", sc.seed},       {"trials", trials},
                        {"samples", sc.samples}, {"grid", sc.grid},       {"grid_points", sc.grid_points},
                        {"budget", sc.budget}};
    const auto reports = bhl::run_suite(suite, sc);

    int passed = 0, failed = 0, declined = 0;
    for (const auto& r : reports) {
        if (r.status == bhl::CheckStatus::passed) ++passed;
        else if (r.status == bhl::CheckStatus::failed) ++failed;
        else ++declined;
        write_witnesses(witness_dir, suite, r, config);
    }

    Output out(c.out);
    std::ostream& os = out.stream();
    const ordered_json meta = metadata("verify", config);
    if (c.format == "json") {
        ordered_json doc = meta;
        doc["summary"] = {{"passed", passed}, {"failed", failed}, {"declined", declined}};
        doc["reports"] = ordered_json::array();
        for (const auto& r : reports) doc["reports"].push_back(bhl::to_json(r));
        os << doc.dump(2) << "\n";
    } else {
        csv_preamble(os, meta);
        os << bhl::csv_header() << "\n";
        for (const auto& r : reports) os << bhl::to_csv_row(r) << "\n";
        os << "# passed=" << passed << " failed=" << failed << " declined=" << declined << "\n";
    }
    if (failed > 0) std::cerr << "bhl verify " << suite << ": " << failed << " failing check(s); witnesses in "
                              << witness_dir << "\n";
    return failed > 0 ? kExitFail : kExitPass;
}

int cmd_envelope(double eps, int m_max, const Common& c) {
    if (!(eps > 0.0)) throw UsageError("--eps must be > 0");
    if (m_max < 2) throw UsageError("--m-max must be >= 2");
    const auto env = bhl::subexp_envelope(eps, m_max);
    const ordered_json meta = metadata("envelope", {{"eps", eps}, {"m_max", m_max}});
    Output out(c.out);
    std::ostream& os = out.stream();
    if (c.format == "json") {
        ordered_json doc = meta;
        doc["kappa"] = env.kappa;
        doc["log_kappa"] = env.log_kappa;
        doc["argmax_m"] = env.argmax_m;
        doc["decreasing_tail"] = env.decreasing_tail;
        doc["series"] = ordered_json::array();
        for (const auto& row : env.series) {
            doc["series"].push_back(
                {{"m", row.m}, {"k_star", row.k_star}, {"log_bound", row.log_bound}, {"log_ratio", row.log_ratio}});
        }
        os << doc.dump(2) << "\n";
    } else {
        csv_preamble(os, meta);
        os << "# kappa=" << number(env.kappa) << " argmax_m=" << env.argmax_m
           << " decreasing_tail=" << (env.decreasing_tail ? "true" : "false") << "\n";
        os << "m,k_star,log_bound,log_ratio,ratio\n";
        for (const auto& row : env.series) {
            os << row.m << "," << row.k_star << "," << number(row.log_bound) << "," << number(row.log_ratio) << ","
               << number(std::exp(row.log_ratio)) << "\n";
        }
    }
    return kExitPass;
}

int cmd_search(int m, int n, int budget, std::uint64_t grid_points, const std::string& witness_dir, const Common& c) {
    if (m < 1 || n < 1) throw UsageError("--m and --n must be >= 1");
    if (budget < 1) throw UsageError("--budget must be >= 1");
    const auto result = bhl::lower_bound_search(m, n, budget, c.seed, grid_points);
    const ordered_json config{{"m", m}, {"n", n}, {"budget", budget}, {"seed", c.seed}, {"grid_points", grid_points}};
    std::filesystem::create_directories(witness_dir);
    const std::string witness_path = witness_dir + "/search-m" + std::to_string(m) + "-n" + std::to_string(n) +
                                     "-seed" + std::to_string(c.seed) + ".json";
    std::ofstream(witness_path) << bhl::serialize(result.witness) << "\n";

    const ordered_json meta = metadata("search", config);
    Output out(c.out);
    std::ostream& os = out.stream();
    if (c.format == "json") {
        ordered_json doc = meta;
        doc["best_ratio"] = result.best_ratio;
        doc["upper"] = result.upper;
        doc["gap"] = result.gap;
        doc["consistent"] = result.consistent;
        doc["evaluations"] = result.evaluations;
        doc["witness"] = witness_path;
        os << doc.dump(2) << "\n";
    } else {
        csv_preamble(os, meta);
        os << "m,n,budget,best_ratio,upper,gap,consistent,witness\n";
        os << m << "," << n << "," << budget << "," << number(result.best_ratio) << "," << number(result.upper) << ","
           << number(result.gap) << "," << (result.consistent ? "true" : "false") << "," << witness_path << "\n";
    }
    return result.consistent ? kExitPass : kExitFail;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int cmd_inspect(const std::string& polynomial_path, const std::string& operator_path, int budget, int grid,
                std::uint64_t grid_points, const Common& c) {
    if (polynomial_path.empty() && operator_path.empty()) throw UsageError("give --polynomial and/or --operator");
    ordered_json doc = metadata("inspect", {{"polynomial", polynomial_path},
                                            {"operator", operator_path},
                                            {"budget", budget},
                                            {"grid", grid},
                                            {"seed", c.seed}});
    std::optional<bhl::LinearOperator> v;
    if (!operator_path.empty()) {
        v = bhl::parse_operator(read_file(operator_path));
        const auto norm = bhl::operator_norm(*v);
        doc["operator"] = {{"rows", v->rows()},
                           {"cols", v->cols()},
                           {"norm", norm.value},
                           {"certificate", bhl::certificate_name(norm.certificate)}};
        if (v->source().exponent() == 1.0 && v->target().exponent() == 2.0) {
            doc["operator"]["grothendieck_upper"] = bhl::grothendieck_upper(*v);
        }
    }
    if (!polynomial_path.empty()) {
        const auto p = bhl::parse_polynomial(read_file(polynomial_path));
        bhl::Target target;
        if (p.coeff_dim() > 1) {
            if (!v) throw UsageError("vector coefficients need --operator for their space");
            target = v->source();
        }
        const auto tp = bhl::TorusPolynomial::from(p);
        const int g = grid > 0 ? grid : bhl::auto_grid(tp, grid_points);
        const double m = p.degree();
        doc["polynomial"] = {{"n", p.dimension()},
                             {"m", p.degree()},
                             {"coeff_dim", p.coeff_dim()},
                             {"coeff_l1", bhl::coeff_lp_norm(p, 1.0, target)},
                             {"coeff_l2", bhl::coeff_lp_norm(p, 2.0, target)},
                             {"coeff_bh", bhl::coeff_lp_norm(p, 2.0 * m / (m + 1.0), target)},
                             {"sup_lower", bhl::supnorm_lower(tp, budget, c.seed, target)},
                             {"sup_upper", bhl::supnorm_upper(tp, g, target)},
                             {"grid_per_axis", g}};
    }
    Output out(c.out);
    out.stream() << doc.dump(2) << "\n";
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bohnenblust-Hille constants and desk-scale inequality checks"};
    app.set_version_flag("--version", std::string("bhl ") + BHL_VERSION);
    app.require_subcommand(1);

    Common constants_common;
    std::string m_range = "1..10";
    double r = 1.0;
    double t = 1.0;
    std::optional<int> k;
    auto* constants = app.add_subcommand("constants", "table of constants for a range of degrees");
    constants->add_option("--m", m_range, "degree range a..b")->capture_default_str();
    constants->add_option("--r", r, "summing exponent r in [1, 2)")->capture_default_str();
    constants->add_option("--t", t, "multilinear exponent t in [1, 2)")->capture_default_str();
    constants->add_option("--k", k, "fixed split point (default: k*)");
    add_common(constants, constants_common, false);

    Common verify_common;
    std::string suite;
    bhl::SuiteConfig sc;
    std::string witness_dir = "witnesses";
    auto* verify = app.add_subcommand("verify", "run a randomized verification suite");
    verify->add_option("suite", suite, "suite name")->required();
    verify->add_option("--trials", sc.trials, "instances (0 = suite default)")->capture_default_str();
    verify->add_option("--samples", sc.samples, "Monte Carlo samples or sign draws")->capture_default_str();
    verify->add_option("--budget", sc.budget, "phase-ascent starts per sup-norm enclosure")->capture_default_str();
    verify->add_option("--grid", sc.grid, "phases per grid axis (0 = from --grid-points)")->capture_default_str();
    verify->add_option("--grid-points", sc.grid_points, "grid size cap per enclosure")->capture_default_str();
    verify->add_option("--workers", sc.workers, "threads (0 = all cores)")->capture_default_str();
    verify->add_option("--witness-dir", witness_dir, "directory for failure witnesses")->capture_default_str();
    add_common(verify, verify_common, true);

    Common envelope_common;
    double eps = 0.2;
    int m_max = 500;
    auto* envelope = app.add_subcommand("envelope", "subexponential envelope of the scalar constants");
    envelope->add_option("--eps", eps, "growth allowance epsilon > 0")->capture_default_str();
    envelope->add_option("--m-max,--m", m_max, "largest degree scanned")->capture_default_str();
    add_common(envelope, envelope_common, false);

    Common search_common;
    int search_m = 2;
    int search_n = 2;
    int search_budget = 256;
    std::uint64_t search_grid_points = 4096;
    std::string search_witness_dir = "witnesses";
    auto* search = app.add_subcommand("search", "empirical lower bound for the polynomial constant");
    search->add_option("--m", search_m, "degree")->capture_default_str();
    search->add_option("--n", search_n, "number of variables")->capture_default_str();
    search->add_option("--budget", search_budget, "ratio evaluations")->capture_default_str();
    search->add_option("--grid-points", search_grid_points, "grid size cap per sup-norm bound")->capture_default_str();
    search->add_option("--witness-dir", search_witness_dir, "directory for the witness polynomial")
        ->capture_default_str();
    add_common(search, search_common, true);

    Common inspect_common;
    std::string polynomial_path;
    std::string operator_path;
    int inspect_budget = 16;
    int inspect_grid = 0;
    std::uint64_t inspect_grid_points = 1u << 16;
    auto* inspect = app.add_subcommand("inspect", "norms of a polynomial and/or operator file");
    inspect->add_option("--polynomial", polynomial_path, "polynomial file");
    inspect->add_option("--operator", operator_path, "operator file");
    inspect->add_option("--budget", inspect_budget, "phase-ascent starts")->capture_default_str();
    inspect->add_option("--grid", inspect_grid, "phases per grid axis (0 = from --grid-points)")->capture_default_str();
    inspect->add_option("--grid-points", inspect_grid_points, "grid size cap")->capture_default_str();
    add_common(inspect, inspect_common, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*constants) return cmd_constants(m_range, r, t, k, constants_common);
        if (*verify) return cmd_verify(suite, sc, witness_dir, verify_common);
        if (*envelope) return cmd_envelope(eps, m_max, envelope_common);
        if (*search) {
            return cmd_search(search_m, search_n, search_budget, search_grid_points, search_witness_dir, search_common);
        }
        if (*inspect) {
            return cmd_inspect(polynomial_path, operator_path, inspect_budget, inspect_grid, inspect_grid_points,
                               inspect_common);
        }
    } catch (const UsageError& e) {
        std::cerr << "bhl: " << e.what() << "\n";
        return kExitUsage;
    } catch (const bhl::ParseError& e) {
        std::cerr << "bhl: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bhl: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "bhl: error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}
