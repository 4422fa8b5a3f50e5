#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace jetrope {

enum class Suite { Laws, BasisMixed, Structured, HighJet, MatchedJet, Norms, Taskgen };

const char* suite_name(Suite suite);
/// Throws std::invalid_argument for unknown names.
Suite parse_suite(std::string_view name);

/// Run configuration. File format is INI:
///
///   [run]      suite, seed, methods (comma separated, empty = suite default)
///   [basis]    L, theta, omega, frequencies, damping_grid, raw_damping, eta
///   [fit]      lambda, raw_lambda, train_lags, eval_lags
///   [norms]    order, c, eta, positions
///   [taskgen]  sequences, lengths, kernels
///
/// Every key is optional; unknown sections or keys are errors.
struct SuiteConfig {
    Suite suite = Suite::Laws;
    std::uint64_t seed = 0;
    std::vector<std::string> methods;

    double length = 1024.0;
    double theta = 10000.0;
    double omega = 0.05;
    int frequencies = 8;
    std::vector<double> damping_grid{0.001, 0.005, 0.02};
    double raw_damping = 1e-4;
    double eta = 1.0;

    double lambda = 1e-8;
    double raw_lambda = 1e-4;
    int train_lags = 1024;
    int eval_lags = 8192;

    int norm_order = 3;
    double norm_c = 2.4576;
    double norm_eta = 0.104;
    int norm_positions = 2048;

    int sequences = 10000;
    std::vector<int> lengths{256, 1024};
    std::vector<std::string> kernels{"first_jet", "second_jet", "third_jet"};

    std::filesystem::path out_dir = ".";

    bool operator==(const SuiteConfig&) const = default;
};

/// Error raised for malformed or invalid configuration. `field` names the
/// offending key; `line` is nonzero for syntax errors.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, unsigned long line, const std::string& message);
    const std::string& field() const { return field_; }
    unsigned long line() const { return line_; }

private:
    std::string field_;
    unsigned long line_;
};

SuiteConfig config_parse(const std::string& text);
SuiteConfig config_load(const std::filesystem::path& path);
/// Canonical form: every key, fixed order, round-trip precision.
std::string config_serialize(const SuiteConfig& config);
/// Throws ConfigError naming the first invalid field.
void config_validate(const SuiteConfig& config);

/// Methods a suite runs when the config leaves the list empty.
std::vector<std::string> default_methods(Suite suite);

struct RunResult {
    int exit_code = 0;
    std::vector<std::filesystem::path> files;
};

/// Runs one suite and writes <suite>.csv and <suite>.md (plus datasets for
/// taskgen) into config.out_dir. Parallelism is capped by JETROPE_THREADS.
RunResult run(const SuiteConfig& config);

/// "%.6g" and "%a" renderings used by every CSV.
std::string format_short(double v);
std::string format_hex(double v);

} // namespace jetrope
