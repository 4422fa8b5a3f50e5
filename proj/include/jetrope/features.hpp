#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "jetrope/jet_operators.hpp"

namespace jetrope {

enum class MethodKind {
    Rope,
    Alibi,
    RopeAlibi,
    DampedRope,
    DirectSum,
    StabilizedJordan,
    RawJordan,
    ScaledExact,
    JordanGamma0,
    JordanM3,
    NormJet,
};

/// A fixed relative-position basis. `order`, `c`, `spectrum` and
/// `poly_degree` are only meaningful for the kinds that use them.
struct Method {
    MethodKind kind = MethodKind::Rope;
    int order = 1;
    double c = 0.0;
    std::vector<double> spectrum;
    int poly_degree = 1;

    static Method rope() { return of(MethodKind::Rope); }
    static Method alibi() { return of(MethodKind::Alibi); }
    static Method rope_alibi() { return of(MethodKind::RopeAlibi); }
    static Method damped_rope() { return of(MethodKind::DampedRope); }
    static Method direct_sum(int poly_degree = 1);
    static Method stabilized_jordan() { return of(MethodKind::StabilizedJordan, 2); }
    static Method raw_jordan() { return of(MethodKind::RawJordan, 2); }
    static Method scaled_exact(int order, double c);
    static Method jordan_gamma0() { return of(MethodKind::JordanGamma0, 2); }
    static Method jordan_m3() { return of(MethodKind::JordanM3, 3); }
    static Method norm_jet(int order, double c, std::vector<double> spectrum);

    /// Canonical identifier, e.g. "scaled_exact_m3_c0.1" or "norm_jet_m3_c1.5_a0.7-0.2-0.1".
    std::string name() const;
    /// Inverse of name(); throws std::invalid_argument for unknown identifiers.
    static Method parse(std::string_view text);

    /// Jordan chain length that sets the frequency grid (channel budget).
    int grid_order() const;

private:
    static Method of(MethodKind kind, int order = 1) {
        Method m;
        m.kind = kind;
        m.order = order;
        return m;
    }
};

/// Shared configuration for every bank.
struct BankConfig {
    double theta = 10000.0;
    double target_omega = 0.05;
    double train_length = 1024.0;
    int frequencies = 8;
    std::vector<double> damping_grid{0.001, 0.005, 0.02};
    /// Damping of the raw Jordan bank: the floor of the softplus parameterization.
    double raw_damping = 1e-4;
    double eta = 1.0;
};

/// theta^{-2k/d_h} for k < frequencies with d_h = 2 m frequencies, followed by
/// the target frequency.
std::vector<double> bank_frequencies(const BankConfig& config, int order);

/// Matrix of lags x features. Column order: for each frequency (grid order,
/// target omega last), for each damping value, for each jet order r, the pair
/// (cos, sin); polynomial columns 1, d, d^2, ... come last.
struct FeatureBank {
    Method method;
    BankConfig config;
    std::vector<double> lags;
    double train_cutoff = 0.0;
    Eigen::MatrixXd matrix;
    std::vector<std::string> labels;
};

FeatureBank build_bank(const Method& method, const BankConfig& config, const LagGrid& grid);

/// Parameters shared by the probe targets.
struct TargetConfig {
    double omega = 0.05;
    double train_length = 1024.0;
    double jet_damping = 0.1;
};

struct ProbeTarget {
    std::string name;
    std::function<double(double)> y;
    TargetConfig params;
    int jet_order = -1; ///< r for frequency-jet targets, -1 otherwise
};

// Target formulas; the synthetic task kernels evaluate these same functions.
double phase_target(double d, double omega);
double linear_target(double d, double length);
double mixed_target(double d, double omega, double length);
/// x^r e^{-c x} cos(omega d) with x = d / L.
double scaled_jet_target(double d, int r, double omega, double length, double damping);

double phase_drift_target(double d, double omega, double length);
double seasonal_trend_target(double d, double length);
double damped_wave_target(double d, double omega, double length);
double rhythm_envelope_target(double d, double omega);
double motif_spacing_target(double d);

/// phase, linear, mixed, jet1_undamped, jet1, jet2, jet3, phase_drift,
/// seasonal_trend, damped_wave, rhythm_envelope, motif_spacing.
std::vector<ProbeTarget> evaluate_targets(const TargetConfig& config = {});
ProbeTarget find_target(const std::vector<ProbeTarget>& catalogue, std::string_view name);

struct FitResult {
    Eigen::VectorXd weights;
    double lambda = 0.0;
    double train_mse = 0.0;
    double eval_mse = 0.0;
    double r_squared = 0.0;
    double condition_number = 0.0;
};

/// Ridge readout fit on the lags below the bank's train cutoff; metrics for
/// the evaluation are taken over every lag in the bank. Columns are scaled to
/// unit RMS on the training lags before solving and the weights mapped back.
FitResult fit_readout(const FeatureBank& bank, const ProbeTarget& target, double lambda);

} // namespace jetrope
