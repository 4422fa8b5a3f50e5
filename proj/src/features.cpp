#include "jetrope/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>

namespace jetrope {

namespace {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double parse_number(std::string_view text, std::string_view whole) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw std::invalid_argument("unknown method: " + std::string(whole));
    }
    return v;
}

int parse_int(std::string_view text, std::string_view whole) {
    int v = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw std::invalid_argument("unknown method: " + std::string(whole));
    }
    return v;
}

bool consume(std::string_view& text, std::string_view prefix) {
    if (!text.starts_with(prefix)) {
        return false;
    }
    text.remove_prefix(prefix.size());
    return true;
}

// Splits "m3_c0.1" style suffixes at the next underscore.
std::string_view take_field(std::string_view& text) {
    const auto pos = text.find('_');
    std::string_view field = text.substr(0, pos);
    text.remove_prefix(pos == std::string_view::npos ? text.size() : pos + 1);
    return field;
}

void check_spectrum(const std::vector<double>& spectrum, int order) {
    if (static_cast<int>(spectrum.size()) != order) {
        throw std::invalid_argument("norm_jet spectrum needs one weight per jet order");
    }
    double total = 0.0;
    for (double a : spectrum) {
        if (!(a >= 0.0) || !std::isfinite(a)) {
            throw std::invalid_argument("norm_jet spectrum weights must be nonnegative");
        }
        total += a;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("norm_jet spectrum weights must sum to one");
    }
}

} // namespace

Method Method::direct_sum(int poly_degree) {
    if (poly_degree < 1) {
        throw std::invalid_argument("direct_sum polynomial degree must be at least 1");
    }
    Method m = of(MethodKind::DirectSum);
    m.poly_degree = poly_degree;
    return m;
}

Method Method::scaled_exact(int order, double c) {
    if (order < 1 || !(c >= 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument("scaled_exact needs order >= 1 and c >= 0");
    }
    Method m = of(MethodKind::ScaledExact, order);
    m.c = c;
    return m;
}

Method Method::norm_jet(int order, double c, std::vector<double> spectrum) {
    if (order < 1 || !(c >= 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument("norm_jet needs order >= 1 and c >= 0");
    }
    check_spectrum(spectrum, order);
    Method m = of(MethodKind::NormJet, order);
    m.c = c;
    m.spectrum = std::move(spectrum);
    return m;
}

std::string Method::name() const {
    switch (kind) {
    case MethodKind::Rope: return "rope";
    case MethodKind::Alibi: return "alibi";
    case MethodKind::RopeAlibi: return "rope_alibi";
    case MethodKind::DampedRope: return "damped_rope";
    case MethodKind::DirectSum:
        return poly_degree == 1 ? "direct_sum" : "direct_sum_p" + std::to_string(poly_degree);
    case MethodKind::StabilizedJordan: return "stabilized_jordan";
    case MethodKind::RawJordan: return "raw_jordan";
    case MethodKind::ScaledExact:
        return "scaled_exact_m" + std::to_string(order) + "_c" + format_number(c);
    case MethodKind::JordanGamma0: return "jordan_gamma0";
    case MethodKind::JordanM3: return "jordan_m3";
    case MethodKind::NormJet: {
        std::string out = "norm_jet_m" + std::to_string(order) + "_c" + format_number(c) + "_a";
        for (std::size_t i = 0; i < spectrum.size(); ++i) {
            out += (i ? "-" : "") + format_number(spectrum[i]);
        }
        return out;
    }
    }
    return "unknown";
}

Method Method::parse(std::string_view text) {
    const std::string_view whole = text;
    if (text == "rope") return rope();
    if (text == "alibi") return alibi();
    if (text == "rope_alibi") return rope_alibi();
    if (text == "damped_rope") return damped_rope();
    if (text == "direct_sum") return direct_sum();
    if (text == "stabilized_jordan") return stabilized_jordan();
    if (text == "raw_jordan") return raw_jordan();
    if (text == "jordan_gamma0") return jordan_gamma0();
    if (text == "jordan_m3") return jordan_m3();
    if (consume(text, "direct_sum_p")) {
        return direct_sum(parse_int(text, whole));
    }
    const bool scaled = consume(text, "scaled_exact_");
    const bool norm = !scaled && consume(text, "norm_jet_");
    if (!scaled && !norm) {
        throw std::invalid_argument("unknown method: " + std::string(whole));
    }
    std::string_view order_field = take_field(text);
    std::string_view c_field = take_field(text);
    if (!consume(order_field, "m") || !consume(c_field, "c")) {
        throw std::invalid_argument("unknown method: " + std::string(whole));
    }
    const int order = parse_int(order_field, whole);
    const double c = parse_number(c_field, whole);
    if (scaled) {
        if (!text.empty()) {
            throw std::invalid_argument("unknown method: " + std::string(whole));
        }
        return scaled_exact(order, c);
    }
    if (!consume(text, "a")) {
        throw std::invalid_argument("unknown method: " + std::string(whole));
    }
    std::vector<double> spectrum;
    while (!text.empty()) {
        const auto pos = text.find('-');
        spectrum.push_back(parse_number(text.substr(0, pos), whole));
        text.remove_prefix(pos == std::string_view::npos ? text.size() : pos + 1);
    }
    return norm_jet(order, c, std::move(spectrum));
}

int Method::grid_order() const {
    switch (kind) {
    case MethodKind::Rope:
    case MethodKind::Alibi:
    case MethodKind::RopeAlibi:
    case MethodKind::DirectSum:
        return 1;
    case MethodKind::DampedRope:
    case MethodKind::StabilizedJordan:
    case MethodKind::RawJordan:
    case MethodKind::JordanGamma0:
        return 2;
    case MethodKind::JordanM3:
        return 3;
    case MethodKind::ScaledExact:
    case MethodKind::NormJet:
        return order;
    }
    return 1;
}

std::vector<double> bank_frequencies(const BankConfig& config, int order) {
    const double head_dim = 2.0 * order * config.frequencies;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(config.frequencies) + 1);
    for (int k = 0; k < config.frequencies; ++k) {
        out.push_back(std::pow(config.theta, -2.0 * k / head_dim));
    }
    out.push_back(config.target_omega);
    return out;
}

namespace {

enum class Coordinate { Lag, Scaled, Bounded };

struct JetFamily {
    int order = 1;
    std::vector<double> rates; ///< envelope decay per unit lag
    Coordinate coordinate = Coordinate::Lag;
    double eta = 1.0;
};

double coordinate_value(Coordinate coord, double d, double length) {
    switch (coord) {
    case Coordinate::Lag: return d;
    case Coordinate::Scaled: return d / length;
    case Coordinate::Bounded: return bounded_tau(d, length);
    }
    return d;
}

std::string frequency_label(int k, std::size_t count) {
    return static_cast<std::size_t>(k) + 1 == count ? "target" : "w" + std::to_string(k);
}

// Appends one (cos, sin) pair per (frequency, rate, order) in that nesting.
void append_jets(const JetFamily& family, const BankConfig& config, const std::vector<double>& freqs,
                 const std::vector<double>& lags, std::vector<std::vector<double>>& cols,
                 std::vector<std::string>& labels) {
    for (std::size_t k = 0; k < freqs.size(); ++k) {
        const double w = freqs[k];
        for (std::size_t g = 0; g < family.rates.size(); ++g) {
            const double rate = family.rates[g];
            for (int r = 0; r < family.order; ++r) {
                std::vector<double> c(lags.size());
                std::vector<double> s(lags.size());
                double factorial = 1.0;
                for (int i = 2; i <= r; ++i) {
                    factorial *= i;
                }
                for (std::size_t i = 0; i < lags.size(); ++i) {
                    const double d = lags[i];
                    const double u = family.eta * coordinate_value(family.coordinate, d, config.train_length);
                    const double a = std::pow(u, r) / factorial * std::exp(-rate * d);
                    c[i] = a * std::cos(w * d);
                    s[i] = a * std::sin(w * d);
                }
                const std::string tag = frequency_label(static_cast<int>(k), freqs.size()) + "_g" +
                                        std::to_string(g) + "_r" + std::to_string(r);
                cols.push_back(std::move(c));
                labels.push_back(tag + "_cos");
                cols.push_back(std::move(s));
                labels.push_back(tag + "_sin");
            }
        }
    }
}

void append_polynomial(int degree, const std::vector<double>& lags, std::vector<std::vector<double>>& cols,
                       std::vector<std::string>& labels) {
    for (int p = 0; p <= degree; ++p) {
        std::vector<double> col(lags.size());
        for (std::size_t i = 0; i < lags.size(); ++i) {
            col[i] = std::pow(lags[i], p);
        }
        cols.push_back(std::move(col));
        labels.push_back(p == 0 ? "one" : "d^" + std::to_string(p));
    }
}

} // namespace

FeatureBank build_bank(const Method& method, const BankConfig& config, const LagGrid& grid) {
    if (!(config.train_length > 0.0) || config.frequencies < 1 || !(config.theta > 1.0)) {
        throw std::invalid_argument("bank config needs L > 0, theta > 1 and at least one frequency");
    }
    const std::vector<double>& lags = grid.values();
    const std::vector<double> freqs = bank_frequencies(config, method.grid_order());
    std::vector<std::vector<double>> cols;
    std::vector<std::string> labels;

    const auto rope_part = [&] { append_jets({1, {0.0}}, config, freqs, lags, cols, labels); };

    switch (method.kind) {
    case MethodKind::Rope:
        rope_part();
        break;
    case MethodKind::Alibi:
        append_polynomial(1, lags, cols, labels);
        break;
    case MethodKind::RopeAlibi:
        rope_part();
        append_polynomial(1, lags, cols, labels);
        break;
    case MethodKind::DirectSum:
        rope_part();
        append_polynomial(method.poly_degree, lags, cols, labels);
        break;
    case MethodKind::DampedRope:
        append_jets({1, config.damping_grid}, config, freqs, lags, cols, labels);
        break;
    case MethodKind::StabilizedJordan:
        append_jets({2, config.damping_grid, Coordinate::Bounded, config.eta}, config, freqs, lags, cols, labels);
        break;
    case MethodKind::RawJordan:
        append_jets({2, {config.raw_damping}, Coordinate::Lag, config.eta}, config, freqs, lags, cols, labels);
        break;
    case MethodKind::JordanGamma0:
        append_jets({2, {0.0}, Coordinate::Bounded, config.eta}, config, freqs, lags, cols, labels);
        break;
    case MethodKind::JordanM3:
        append_jets({3, config.damping_grid, Coordinate::Bounded, config.eta}, config, freqs, lags, cols, labels);
        break;
    case MethodKind::ScaledExact:
        append_jets({method.order, {method.c / config.train_length}, Coordinate::Scaled, config.eta}, config, freqs,
                    lags, cols, labels);
        break;
    case MethodKind::NormJet: {
        // One (cos, sin) pair per frequency: the jet orders are blended by the spectrum.
        std::vector<std::vector<double>> jets;
        std::vector<std::string> jet_labels;
        append_jets({method.order, {method.c / config.train_length}, Coordinate::Scaled, config.eta}, config, freqs,
                    lags, jets, jet_labels);
        const std::size_t m = static_cast<std::size_t>(method.order);
        for (std::size_t k = 0; k < freqs.size(); ++k) {
            for (int part = 0; part < 2; ++part) {
                std::vector<double> col(lags.size(), 0.0);
                for (std::size_t r = 0; r < m; ++r) {
                    const auto& src = jets[(k * m + r) * 2 + part];
                    for (std::size_t i = 0; i < lags.size(); ++i) {
                        col[i] += method.spectrum[r] * src[i];
                    }
                }
                cols.push_back(std::move(col));
                labels.push_back(frequency_label(static_cast<int>(k), freqs.size()) + (part ? "_sin" : "_cos"));
            }
        }
        break;
    }
    }

    FeatureBank bank;
    bank.method = method;
    bank.config = config;
    bank.lags = lags;
    bank.train_cutoff = grid.train_cutoff();
    bank.matrix.resize(static_cast<Eigen::Index>(lags.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        for (std::size_t i = 0; i < lags.size(); ++i) {
            bank.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cols[j][i];
        }
    }
    bank.labels = std::move(labels);
    return bank;
}

double phase_target(double d, double omega) { return std::cos(omega * d); }

double linear_target(double d, double length) { return d / length; }

double mixed_target(double d, double omega, double length) { return d / length * std::cos(omega * d); }

double scaled_jet_target(double d, int r, double omega, double length, double damping) {
    const double x = d / length;
    return std::pow(x, r) * std::exp(-damping * x) * std::cos(omega * d);
}

double phase_drift_target(double d, double omega, double length) {
    const double delta = 0.01 * omega;
    return std::cos((omega + delta * d / length) * d);
}

double seasonal_trend_target(double d, double length) { return d / length + 0.5 * std::cos(0.01 * d); }

double damped_wave_target(double d, double omega, double length) {
    return std::exp(-d / length) * std::cos(omega * d);
}

double rhythm_envelope_target(double d, double omega) {
    return (1.0 + 0.5 * std::cos(omega / 8.0 * d)) * std::cos(omega * d);
}

double motif_spacing_target(double d) {
    constexpr double period = 200.0;
    constexpr double width = 20.0;
    // Bumps do not overlap, so only the nearest motif contributes.
    const double nearest = std::round(d / period) * period;
    return std::max(0.0, 1.0 - std::abs(d - nearest) / width);
}

std::vector<ProbeTarget> evaluate_targets(const TargetConfig& config) {
    const double w = config.omega;
    const double len = config.train_length;
    const double c = config.jet_damping;
    std::vector<ProbeTarget> out;
    const auto add = [&](std::string name, std::function<double(double)> y, int r = -1) {
        out.push_back({std::move(name), std::move(y), config, r});
    };
    add("phase", [w](double d) { return phase_target(d, w); });
    add("linear", [len](double d) { return linear_target(d, len); });
    add("mixed", [w, len](double d) { return mixed_target(d, w, len); });
    add("jet1_undamped", [w, len](double d) { return scaled_jet_target(d, 1, w, len, 0.0); }, 1);
    add("jet1", [w, len, c](double d) { return scaled_jet_target(d, 1, w, len, c); }, 1);
    add("jet2", [w, len, c](double d) { return scaled_jet_target(d, 2, w, len, c); }, 2);
    add("jet3", [w, len, c](double d) { return scaled_jet_target(d, 3, w, len, c); }, 3);
    add("phase_drift", [w, len](double d) { return phase_drift_target(d, w, len); });
    add("seasonal_trend", [len](double d) { return seasonal_trend_target(d, len); });
    add("damped_wave", [w, len](double d) { return damped_wave_target(d, w, len); });
    add("rhythm_envelope", [w](double d) { return rhythm_envelope_target(d, w); });
    add("motif_spacing", [](double d) { return motif_spacing_target(d); });
    return out;
}

ProbeTarget find_target(const std::vector<ProbeTarget>& catalogue, std::string_view name) {
    for (const auto& t : catalogue) {
        if (t.name == name) {
            return t;
        }
    }
    throw std::invalid_argument("unknown target: " + std::string(name));
}

FitResult fit_readout(const FeatureBank& bank, const ProbeTarget& target, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("lambda must be finite and nonnegative");
    }
    const Eigen::Index rows = bank.matrix.rows();
    const Eigen::Index cols = bank.matrix.cols();
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        y(i) = target.y(bank.lags[static_cast<std::size_t>(i)]);
    }
    Eigen::Index train = 0;
    while (train < rows && bank.lags[static_cast<std::size_t>(train)] < bank.train_cutoff) {
        ++train;
    }
    if (train == 0) {
        throw std::invalid_argument("no lags below the training cutoff");
    }

    Eigen::VectorXd scale(cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        const double rms = std::sqrt(bank.matrix.col(j).head(train).squaredNorm() / static_cast<double>(train));
        scale(j) = rms > 0.0 ? rms : 1.0;
    }
    const Eigen::MatrixXd standardized = bank.matrix.topRows(train) * scale.cwiseInverse().asDiagonal();

    Eigen::VectorXd w;
    if (lambda > 0.0) {
        Eigen::MatrixXd augmented(train + cols, cols);
        augmented << standardized, std::sqrt(lambda) * Eigen::MatrixXd::Identity(cols, cols);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(train + cols);
        rhs.head(train) = y.head(train);
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(augmented);
        w = qr.solve(rhs);
        // One step of iterative refinement recovers digits lost to near-collinear columns.
        w += qr.solve(rhs - augmented * w);
    } else {
        const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(standardized);
        w = cod.solve(y.head(train));
        w += cod.solve(y.head(train) - standardized * w);
    }

    FitResult out;
    out.lambda = lambda;
    out.weights = w.cwiseQuotient(scale);
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(standardized);
    const auto& sv = svd.singularValues();
    out.condition_number = sv.size() == 0 ? 1.0 : sv(0) / sv(sv.size() - 1);

    const Eigen::VectorXd residual = bank.matrix * out.weights - y;
    out.train_mse = residual.head(train).squaredNorm() / static_cast<double>(train);
    out.eval_mse = residual.squaredNorm() / static_cast<double>(rows);
    const double total = (y.array() - y.mean()).square().sum();
    const double ss_res = residual.squaredNorm();
    out.r_squared = total > 0.0 ? 1.0 - ss_res / total : (ss_res == 0.0 ? 1.0 : -INFINITY);
    return out;
}

} // namespace jetrope
