#include "jetrope/probes.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "jetrope/factorize.hpp"
#include "jetrope/features.hpp"
#include "jetrope/laws.hpp"
#include "jetrope/synthetic_tasks.hpp"

namespace jetrope {

namespace {

constexpr Suite kSuites[] = {Suite::Laws,      Suite::BasisMixed, Suite::Structured, Suite::HighJet,
                             Suite::MatchedJet, Suite::Norms,     Suite::Taskgen};

} // namespace

const char* suite_name(Suite suite) {
    switch (suite) {
    case Suite::Laws: return "laws";
    case Suite::BasisMixed: return "basis_mixed";
    case Suite::Structured: return "structured";
    case Suite::HighJet: return "high_jet";
    case Suite::MatchedJet: return "matched_jet";
    case Suite::Norms: return "norms";
    case Suite::Taskgen: return "taskgen";
    }
    return "unknown";
}

Suite parse_suite(std::string_view name) {
    for (Suite s : kSuites) {
        if (name == suite_name(s)) {
            return s;
        }
    }
    throw std::invalid_argument("unknown suite: " + std::string(name));
}

std::string format_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string format_hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

ConfigError::ConfigError(std::string field, unsigned long line, const std::string& message)
    : std::runtime_error(message), field_(std::move(field)), line_(line) {}

// ---------------------------------------------------------------- config

namespace {

using boost::property_tree::ptree;

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    if (trim(text).empty()) {
        return out;
    }
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(',', start);
        out.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_scalar(const std::string& field, const std::string& raw) {
    const std::string text = trim(raw);
    T value{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw ConfigError(field, 0, field + ": cannot parse '" + text + "'");
    }
    return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& field, const std::string& raw) {
    std::vector<T> out;
    for (const auto& item : split_list(raw)) {
        out.push_back(parse_scalar<T>(field, item));
    }
    return out;
}

std::string number_text(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F render) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        out += (i ? "," : "") + render(items[i]);
    }
    return out;
}

// Section -> key -> setter. Keys are reported as "section.key".
using Setter = std::function<void(SuiteConfig&, const std::string& field, const std::string& value)>;

const std::map<std::string, std::map<std::string, Setter>>& schema() {
    static const std::map<std::string, std::map<std::string, Setter>> table = {
        {"run",
         {
             {"suite", [](SuiteConfig& c, const std::string& f, const std::string& v) {
                  try {
                      c.suite = parse_suite(trim(v));
                  } catch (const std::invalid_argument& e) {
                      throw ConfigError(f, 0, f + ": " + e.what());
                  }
              }},
             {"seed", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.seed = parse_scalar<std::uint64_t>(f, v); }},
             {"methods", [](SuiteConfig& c, const std::string&, const std::string& v) { c.methods = split_list(v); }},
         }},
        {"basis",
         {
             {"L", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.length = parse_scalar<double>(f, v); }},
             {"theta", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.theta = parse_scalar<double>(f, v); }},
             {"omega", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.omega = parse_scalar<double>(f, v); }},
             {"frequencies", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.frequencies = parse_scalar<int>(f, v); }},
             {"damping_grid", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.damping_grid = parse_list<double>(f, v); }},
             {"raw_damping", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.raw_damping = parse_scalar<double>(f, v); }},
             {"eta", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.eta = parse_scalar<double>(f, v); }},
         }},
        {"fit",
         {
             {"lambda", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.lambda = parse_scalar<double>(f, v); }},
             {"raw_lambda", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.raw_lambda = parse_scalar<double>(f, v); }},
             {"train_lags", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.train_lags = parse_scalar<int>(f, v); }},
             {"eval_lags", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.eval_lags = parse_scalar<int>(f, v); }},
         }},
        {"norms",
         {
             {"order", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.norm_order = parse_scalar<int>(f, v); }},
             {"c", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.norm_c = parse_scalar<double>(f, v); }},
             {"eta", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.norm_eta = parse_scalar<double>(f, v); }},
             {"positions", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.norm_positions = parse_scalar<int>(f, v); }},
         }},
        {"taskgen",
         {
             {"sequences", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.sequences = parse_scalar<int>(f, v); }},
             {"lengths", [](SuiteConfig& c, const std::string& f, const std::string& v) { c.lengths = parse_list<int>(f, v); }},
             {"kernels", [](SuiteConfig& c, const std::string&, const std::string& v) { c.kernels = split_list(v); }},
         }},
    };
    return table;
}

} // namespace

SuiteConfig config_parse(const std::string& text) {
    ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("", e.line(), "line " + std::to_string(e.line()) + ": " + e.message());
    }
    SuiteConfig config;
    const auto& table = schema();
    for (const auto& [section, keys] : tree) {
        const auto known = table.find(section);
        if (keys.empty() && !keys.data().empty()) {
            throw ConfigError(section, 0, section + ": keys must live inside a [section]");
        }
        if (known == table.end()) {
            throw ConfigError(section, 0, "unknown section [" + section + "]");
        }
        for (const auto& [key, value] : keys) {
            const std::string field = section + "." + key;
            const auto setter = known->second.find(key);
            if (setter == known->second.end()) {
                throw ConfigError(field, 0, "unknown key " + field);
            }
            setter->second(config, field, value.data());
        }
    }
    config_validate(config);
    return config;
}

SuiteConfig config_load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("", 0, "cannot open config " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_parse(buf.str());
}

std::string config_serialize(const SuiteConfig& c) {
    const auto ints = [](int v) { return std::to_string(v); };
    const auto strs = [](const std::string& v) { return v; };
    std::ostringstream out;
    out << "[run]\n"
        << "suite = " << suite_name(c.suite) << "\n"
        << "seed = " << c.seed << "\n"
        << "methods = " << join(c.methods, strs) << "\n\n"
        << "[basis]\n"
        << "L = " << number_text(c.length) << "\n"
        << "theta = " << number_text(c.theta) << "\n"
        << "omega = " << number_text(c.omega) << "\n"
        << "frequencies = " << c.frequencies << "\n"
        << "damping_grid = " << join(c.damping_grid, number_text) << "\n"
        << "raw_damping = " << number_text(c.raw_damping) << "\n"
        << "eta = " << number_text(c.eta) << "\n\n"
        << "[fit]\n"
        << "lambda = " << number_text(c.lambda) << "\n"
        << "raw_lambda = " << number_text(c.raw_lambda) << "\n"
        << "train_lags = " << c.train_lags << "\n"
        << "eval_lags = " << c.eval_lags << "\n\n"
        << "[norms]\n"
        << "order = " << c.norm_order << "\n"
        << "c = " << number_text(c.norm_c) << "\n"
        << "eta = " << number_text(c.norm_eta) << "\n"
        << "positions = " << c.norm_positions << "\n\n"
        << "[taskgen]\n"
        << "sequences = " << c.sequences << "\n"
        << "lengths = " << join(c.lengths, ints) << "\n"
        << "kernels = " << join(c.kernels, strs) << "\n";
    return out.str();
}

void config_validate(const SuiteConfig& c) {
    const auto require = [](bool ok, const char* field, const std::string& why) {
        if (!ok) {
            throw ConfigError(field, 0, std::string(field) + ": " + why);
        }
    };
    const auto finite = [](double v) { return std::isfinite(v); };
    require(finite(c.length) && c.length > 0.0, "L", "must be positive");
    require(finite(c.theta) && c.theta > 1.0, "theta", "must exceed 1");
    require(finite(c.omega) && c.omega > 0.0, "omega", "must be positive");
    require(c.frequencies >= 1, "frequencies", "must be at least 1");
    require(!c.damping_grid.empty(), "damping_grid", "must not be empty");
    for (double g : c.damping_grid) {
        require(finite(g) && g >= 0.0, "damping_grid", "values must be nonnegative");
    }
    require(finite(c.raw_damping) && c.raw_damping >= 0.0, "raw_damping", "must be nonnegative");
    require(finite(c.eta), "eta", "must be finite");
    require(finite(c.lambda) && c.lambda >= 0.0, "lambda", "must be nonnegative");
    require(finite(c.raw_lambda) && c.raw_lambda >= 0.0, "raw_lambda", "must be nonnegative");
    require(c.train_lags >= 1, "train_lags", "must be at least 1");
    require(c.eval_lags >= c.train_lags, "eval_lags", "must be at least train_lags");
    for (const auto& m : c.methods) {
        try {
            (void)Method::parse(m);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("methods", 0, std::string("methods: ") + e.what());
        }
    }
    require(c.norm_order >= 1, "norms.order", "must be at least 1");
    require(finite(c.norm_c) && c.norm_c >= 0.0, "norms.c", "must be nonnegative");
    require(finite(c.norm_eta), "norms.eta", "must be finite");
    require(c.norm_positions >= 1, "norms.positions", "must be at least 1");
    require(c.sequences >= 1, "sequences", "must be at least 1");
    require(!c.lengths.empty(), "lengths", "must not be empty");
    for (int t : c.lengths) {
        require(t >= 2, "lengths", "sequence lengths must be at least 2");
    }
    require(!c.kernels.empty(), "kernels", "must not be empty");
    for (const auto& k : c.kernels) {
        try {
            (void)parse_kernel(k);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("kernels", 0, std::string("kernels: ") + e.what());
        }
    }
}

// ---------------------------------------------------------------- suites

std::vector<std::string> default_methods(Suite suite) {
    switch (suite) {
    case Suite::BasisMixed:
        return {"rope",
                "damped_rope",
                "rope_alibi",
                "alibi",
                "direct_sum",
                "stabilized_jordan",
                "raw_jordan",
                "scaled_exact_m2_c0.1",
                "scaled_exact_m2_c1"};
    case Suite::Structured:
        return {"rope",
                "alibi",
                "rope_alibi",
                "damped_rope",
                "direct_sum",
                "stabilized_jordan",
                "jordan_gamma0",
                "raw_jordan",
                "jordan_m3"};
    case Suite::HighJet:
        return {"rope",
                "direct_sum",
                "direct_sum_p3",
                "scaled_exact_m2_c0.1",
                "scaled_exact_m3_c0.1",
                "scaled_exact_m4_c0.1",
                "norm_jet_m4_c0.1_a0.25-0.25-0.25-0.25"};
    case Suite::MatchedJet:
        return {"rope", "scaled_exact_m1_c0.1", "scaled_exact_m2_c0.1", "scaled_exact_m3_c0.1"};
    case Suite::Laws:
    case Suite::Norms:
    case Suite::Taskgen:
        return {};
    }
    return {};
}

namespace {

std::vector<std::string> suite_targets(Suite suite) {
    switch (suite) {
    case Suite::BasisMixed: return {"phase", "linear", "mixed"};
    case Suite::Structured:
        return {"phase_drift", "seasonal_trend", "damped_wave", "rhythm_envelope", "motif_spacing"};
    case Suite::HighJet: return {"jet1", "jet2", "jet3"};
    case Suite::MatchedJet: return {"jet1_undamped", "jet1"};
    default: return {};
    }
}

std::size_t thread_count() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("JETROPE_THREADS")) {
        std::size_t cap = 0;
        const std::string_view text(env);
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
        if (ec == std::errc() && cap >= 1) {
            n = std::min(n, cap);
        }
    }
    return n;
}

// Runs job(0..count-1) on a small pool; results are stored by index so the
// output never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job) {
    const std::size_t workers = std::min(thread_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            job(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(failure_lock);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

void write_file(const std::filesystem::path& path, const std::string& text, RunResult& result) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
    result.files.push_back(path);
}

struct FitRow {
    std::string method;
    std::string target;
    FitResult fit;
};

BankConfig bank_config(const SuiteConfig& c) {
    BankConfig b;
    b.theta = c.theta;
    b.target_omega = c.omega;
    b.train_length = c.length;
    b.frequencies = c.frequencies;
    b.damping_grid = c.damping_grid;
    b.raw_damping = c.raw_damping;
    b.eta = c.eta;
    return b;
}

std::vector<FitRow> run_fits(const SuiteConfig& c) {
    const std::vector<std::string> methods = c.methods.empty() ? default_methods(c.suite) : c.methods;
    const std::vector<std::string> target_names = suite_targets(c.suite);
    const auto catalogue = evaluate_targets({c.omega, c.length, 0.1});
    const LagGrid grid = LagGrid::integers(static_cast<std::size_t>(c.eval_lags), c.train_lags);
    const BankConfig config = bank_config(c);

    std::vector<FitRow> rows(methods.size() * target_names.size());
    parallel_for(methods.size(), [&](std::size_t mi) {
        const Method method = Method::parse(methods[mi]);
        const FeatureBank bank = build_bank(method, config, grid);
        const double lambda = method.kind == MethodKind::RawJordan ? c.raw_lambda : c.lambda;
        for (std::size_t ti = 0; ti < target_names.size(); ++ti) {
            rows[mi * target_names.size() + ti] = {method.name(), target_names[ti],
                                                   fit_readout(bank, find_target(catalogue, target_names[ti]), lambda)};
        }
    });
    std::sort(rows.begin(), rows.end(), [](const FitRow& a, const FitRow& b) {
        return std::tie(a.method, a.target) < std::tie(b.method, b.target);
    });
    return rows;
}

std::string fit_csv(const std::vector<FitRow>& rows) {
    std::string out =
        "method,target,lambda,train_mse,eval_mse,r_squared,condition_number,"
        "lambda_hex,train_mse_hex,eval_mse_hex,r_squared_hex,condition_number_hex\n";
    for (const auto& r : rows) {
        const double values[] = {r.fit.lambda, r.fit.train_mse, r.fit.eval_mse, r.fit.r_squared,
                                 r.fit.condition_number};
        out += r.method + "," + r.target;
        for (double v : values) {
            out += "," + format_short(v);
        }
        for (double v : values) {
            out += "," + format_hex(v);
        }
        out += "\n";
    }
    return out;
}

const FitRow* find_row(const std::vector<FitRow>& rows, const std::string& method, const std::string& target) {
    for (const auto& r : rows) {
        if (r.method == method && r.target == target) {
            return &r;
        }
    }
    return nullptr;
}

std::vector<std::string> unique_methods(const std::vector<FitRow>& rows) {
    std::vector<std::string> out;
    for (const auto& r : rows) {
        if (out.empty() || out.back() != r.method) {
            out.push_back(r.method);
        }
    }
    return out;
}

// Methods x targets grid of one metric.
std::string fit_table(const std::vector<FitRow>& rows, const std::vector<std::string>& targets,
                      double FitResult::*metric) {
    std::string out = "| method |";
    std::string rule = "|---|";
    for (const auto& t : targets) {
        out += " " + t + " |";
        rule += "---:|";
    }
    out += "\n" + rule + "\n";
    for (const auto& m : unique_methods(rows)) {
        out += "| " + m + " |";
        for (const auto& t : targets) {
            const FitRow* r = find_row(rows, m, t);
            out += " " + (r ? format_short(r->fit.*metric) : std::string("-")) + " |";
        }
        out += "\n";
    }
    return out;
}

bool is_control(const std::string& method) {
    return method == "rope" || method == "alibi" || method == "rope_alibi" || method.starts_with("direct_sum");
}

std::string high_jet_summary(const std::vector<FitRow>& rows, const std::vector<std::string>& targets) {
    std::string out = "| target | jet order | min. order | scaled m=2 R² | best control R² |\n|---|---:|---:|---:|---:|\n";
    const auto catalogue = evaluate_targets();
    for (const auto& t : targets) {
        int min_order = 0;
        double m2 = NAN;
        double control = -INFINITY;
        for (const auto& r : rows) {
            if (r.target != t) {
                continue;
            }
            const Method method = Method::parse(r.method);
            if (method.kind == MethodKind::ScaledExact) {
                if (r.fit.r_squared >= 0.9999 && (min_order == 0 || method.order < min_order)) {
                    min_order = method.order;
                }
                if (method.order == 2) {
                    m2 = r.fit.r_squared;
                }
            }
            if (is_control(r.method)) {
                control = std::max(control, r.fit.r_squared);
            }
        }
        out += "| " + t + " | " + std::to_string(find_target(catalogue, t).jet_order) + " | " +
               (min_order ? std::to_string(min_order) : std::string("-")) + " | " + format_short(m2) + " | " +
               format_short(control) + " |\n";
    }
    return out;
}

int run_fit_suite(const SuiteConfig& c, RunResult& result) {
    const auto rows = run_fits(c);
    const auto targets = suite_targets(c.suite);
    const std::string name = suite_name(c.suite);
    std::string md;
    switch (c.suite) {
    case Suite::BasisMixed:
        md = "<!-- mirrors: fixed-basis phase / linear / mixed MSE table -->\n"
             "Evaluation MSE over lags 0.." + std::to_string(c.eval_lags - 1) + ", fit on lags below " +
             std::to_string(c.train_lags) + ".\n\n" + fit_table(rows, targets, &FitResult::eval_mse);
        break;
    case Suite::Structured:
        md = "<!-- mirrors: structured relative-position probe MSE table -->\n"
             "Evaluation MSE over lags 0.." + std::to_string(c.eval_lags - 1) + ".\n\n" +
             fit_table(rows, targets, &FitResult::eval_mse);
        break;
    case Suite::HighJet:
        md = "<!-- mirrors: high-order fixed-basis jet probe table -->\n"
             "R² over the full evaluation grid.\n\n" + fit_table(rows, targets, &FitResult::r_squared) + "\n" +
             high_jet_summary(rows, targets);
        break;
    case Suite::MatchedJet:
        md = "<!-- mirrors: matched scaled first-jet probe table -->\n"
             "R² over the full evaluation grid.\n\n" + fit_table(rows, targets, &FitResult::r_squared);
        break;
    default:
        break;
    }
    write_file(c.out_dir / (name + ".csv"), fit_csv(rows), result);
    write_file(c.out_dir / (name + ".md"), md, result);
    return 0;
}

int run_laws_suite(const SuiteConfig& c, RunResult& result) {
    auto laws = run_all_laws(c.seed);
    std::sort(laws.begin(), laws.end(), [](const LawResult& a, const LawResult& b) { return a.name < b.name; });
    std::string csv = "check,draws,failures,allowed_failures,worst,tolerance,passed,worst_hex,tolerance_hex\n";
    std::string md = "<!-- mirrors: operator law verification summary -->\n"
                     "| check | draws | failures | worst | tolerance | result |\n|---|---:|---:|---:|---:|---|\n";
    int failed = 0;
    for (const auto& l : laws) {
        failed += l.passed() ? 0 : 1;
        csv += l.name + "," + std::to_string(l.draws) + "," + std::to_string(l.failures) + "," +
               std::to_string(l.allowed_failures) + "," + format_short(l.worst) + "," + format_short(l.tolerance) + "," +
               (l.passed() ? "1" : "0") + "," + format_hex(l.worst) + "," + format_hex(l.tolerance) + "\n";
        md += "| " + l.name + " | " + std::to_string(l.draws) + " | " + std::to_string(l.failures) + " | " +
              format_short(l.worst) + " | " + format_short(l.tolerance) + " | " + (l.passed() ? "pass" : "FAIL") + " |\n";
    }
    md += "\n" + std::to_string(laws.size() - failed) + " passed, " + std::to_string(failed) + " failed.\n";
    write_file(c.out_dir / "laws.csv", csv, result);
    write_file(c.out_dir / "laws.md", md, result);
    return failed == 0 ? 0 : 1;
}

int run_norms_suite(const SuiteConfig& c, RunResult& result) {
    constexpr int blocks = 8;
    HeadLayout layout = make_layout(2 * c.norm_order * blocks, c.norm_order, Variant::scaled(c.norm_c, c.length),
                                    c.norm_eta, c.theta);
    layout = with_uniform_params(layout, c.norm_c, c.norm_eta);
    std::vector<std::int64_t> positions(static_cast<std::size_t>(c.norm_positions));
    for (std::size_t t = 0; t < positions.size(); ++t) {
        positions[t] = static_cast<std::int64_t>(t);
    }
    const NormProfile profile = norm_profile(layout, positions);
    std::vector<std::size_t> sample;
    for (std::size_t t = 0; t < positions.size(); t += 128) {
        sample.push_back(t);
    }
    if (sample.back() != positions.size() - 1) {
        sample.push_back(positions.size() - 1);
    }
    std::string csv = "position,query_ratio,key_ratio,product,condition_bound,"
                      "query_ratio_hex,key_ratio_hex,product_hex,condition_bound_hex\n";
    std::string md = "<!-- mirrors: positioned query/key norm diagnostic -->\n"
                     "Order " + std::to_string(c.norm_order) + ", c = " + format_short(c.norm_c) + ", eta = " +
                     format_short(c.norm_eta) + ", L = " + format_short(c.length) + ".\n\n"
                     "| position | query ratio | key ratio | product | condition bound |\n|---:|---:|---:|---:|---:|\n";
    int violations = 0;
    for (std::size_t t : sample) {
        const double q = profile.query_ratio[t];
        const double k = profile.key_ratio[t];
        const double bound = condition_bound(layout, positions[t]);
        const double product = q * k;
        // The product must lie in [1, bound] up to rounding.
        if (product < 1.0 - 1e-12 || product > bound * (1.0 + 1e-12)) {
            ++violations;
        }
        const double values[] = {q, k, product, bound};
        csv += std::to_string(positions[t]);
        for (double v : values) {
            csv += "," + format_short(v);
        }
        for (double v : values) {
            csv += "," + format_hex(v);
        }
        csv += "\n";
        md += "| " + std::to_string(positions[t]) + " | " + format_short(q) + " | " + format_short(k) + " | " +
              format_short(product) + " | " + format_short(bound) + " |\n";
    }
    md += "\nKey norm ratio at position " + std::to_string(positions.back()) + ": " +
          format_short(profile.key_ratio.back()) + "; query norm ratio: " + format_short(profile.query_ratio.back()) +
          ".\n";
    write_file(c.out_dir / "norms.csv", csv, result);
    write_file(c.out_dir / "norms.md", md, result);
    return violations == 0 ? 0 : 1;
}

int run_taskgen_suite(const SuiteConfig& c, RunResult& result) {
    struct Row {
        std::string kernel;
        int length = 0;
        int positive = 0;
        int ties = 0;
        int mismatches = 0;
        std::string data;
    };
    std::vector<Row> rows;
    for (const auto& k : c.kernels) {
        for (int t : c.lengths) {
            rows.push_back({k, t, 0, 0, 0, {}});
        }
    }
    parallel_for(rows.size(), [&](std::size_t i) {
        Row& row = rows[i];
        TeacherKernel kernel;
        kernel.kind = parse_kernel(row.kernel);
        kernel.length = c.length;
        kernel.omega = c.omega;
        for (int n = 0; n < c.sequences; ++n) {
            const QuerySequence seq = generate(kernel, row.length, c.seed + static_cast<std::uint64_t>(n));
            row.positive += seq.label > 0 ? 1 : 0;
            row.ties += seq.tie ? 1 : 0;
            row.mismatches += oracle_label(seq.bits, kernel) == seq.label ? 0 : 1;
            row.data += export_line(seq) + "\n";
        }
    });
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return std::tie(a.kernel, a.length) < std::tie(b.kernel, b.length); });
    std::string csv = "kernel,T,sequences,positive_fraction,ties,oracle_mismatches,positive_fraction_hex\n";
    std::string md = "<!-- mirrors: synthetic query-task dataset summary -->\n"
                     "| kernel | T | sequences | positive fraction | ties | oracle mismatches |\n|---|---:|---:|---:|---:|---:|\n";
    int mismatches = 0;
    for (const auto& r : rows) {
        const double frac = static_cast<double>(r.positive) / c.sequences;
        mismatches += r.mismatches;
        csv += r.kernel + "," + std::to_string(r.length) + "," + std::to_string(c.sequences) + "," + format_short(frac) +
               "," + std::to_string(r.ties) + "," + std::to_string(r.mismatches) + "," + format_hex(frac) + "\n";
        md += "| " + r.kernel + " | " + std::to_string(r.length) + " | " + std::to_string(c.sequences) + " | " +
              format_short(frac) + " | " + std::to_string(r.ties) + " | " + std::to_string(r.mismatches) + " |\n";
        write_file(c.out_dir / ("taskgen_" + r.kernel + "_T" + std::to_string(r.length) + ".txt"), r.data, result);
    }
    write_file(c.out_dir / "taskgen.csv", csv, result);
    write_file(c.out_dir / "taskgen.md", md, result);
    return mismatches == 0 ? 0 : 1;
}

} // namespace

RunResult run(const SuiteConfig& config) {
    config_validate(config);
    std::filesystem::create_directories(config.out_dir);
    RunResult result;
    switch (config.suite) {
    case Suite::Laws: result.exit_code = run_laws_suite(config, result); break;
    case Suite::Norms: result.exit_code = run_norms_suite(config, result); break;
    case Suite::Taskgen: result.exit_code = run_taskgen_suite(config, result); break;
    default: result.exit_code = run_fit_suite(config, result); break;
    }
    return result;
}

} // namespace jetrope
