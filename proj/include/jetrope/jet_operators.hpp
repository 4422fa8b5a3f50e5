#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "jetrope/complex.hpp"
#include "jetrope/matrix.hpp"

namespace jetrope {

enum class VariantKind { Raw, Scaled, Damped };

/// Which exact family a generator belongs to. Scaled carries the damping
/// constant c and the training length L; the effective generator is then
/// (-c/L + i omega) I + (eta/L) N.
struct Variant {
    VariantKind kind = VariantKind::Raw;
    double c = 0.0;
    double length = 1.0;

    static Variant raw() { return {VariantKind::Raw, 0.0, 1.0}; }
    static Variant scaled(double c, double length) { return {VariantKind::Scaled, c, length}; }
    static Variant damped() { return {VariantKind::Damped, 0.0, 1.0}; }
};

/// Generator of one complex Jordan block: (-gamma + i omega) I + eta N_m.
class JordanGenerator {
public:
    static JordanGenerator raw(double gamma, double omega, double eta, int order);
    static JordanGenerator scaled(double c, double length, double omega, double eta, int order);
    /// Raw with the nilpotent amplitude pinned to zero.
    static JordanGenerator damped(double gamma, double omega, int order);

    double gamma() const { return gamma_; }
    double omega() const { return omega_; }
    double eta() const { return eta_; }
    int order() const { return order_; }
    const Variant& variant() const { return variant_; }

    /// Real part of the diagonal, negated: gamma, or c/L for Scaled.
    double damping_rate() const;
    /// Superdiagonal entry: eta, or eta/L for Scaled.
    double shear_rate() const;
    /// Lag coordinate used by the jet features: d, or d/L for Scaled.
    double jet_coordinate(double d) const;

private:
    JordanGenerator(double gamma, double omega, double eta, int order, Variant variant);

    double gamma_;
    double omega_;
    double eta_;
    int order_;
    Variant variant_;
};

/// Ordered nonnegative lags; lags below train_cutoff form the training set.
class LagGrid {
public:
    LagGrid(std::vector<double> values, double train_cutoff);

    /// {0, 1, ..., count-1}.
    static LagGrid integers(std::size_t count, double train_cutoff);

    const std::vector<double>& values() const { return values_; }
    double train_cutoff() const { return train_cutoff_; }
    std::size_t size() const { return values_.size(); }
    std::size_t train_size() const;

private:
    std::vector<double> values_;
    double train_cutoff_;
};

inline constexpr double kDefaultOverflowCap = 1.1420073898156842e26; // e^60

/// Closed-form exponential together with an overflow flag.
struct RelativeOperator {
    ComplexMatrix matrix;
    bool overflow = false;
};

ComplexMatrix generator_matrix(const JordanGenerator& gen);

/// e^{z} sum_{r<m} x^r / r! N^r for a diagonal exponent z and nilpotent
/// coordinate x. The flag is raised when an entry magnitude exceeds the cap.
RelativeOperator jordan_exponential(Complex diagonal_exponent, double nilpotent_coordinate, int order,
                                    double overflow_cap = kDefaultOverflowCap);

/// G(d) = e^{(-gamma + i omega) d} sum_r (eta d)^r / r! N^r. Any real d is
/// accepted; negative d gives the absolute maps used by the factorization.
RelativeOperator relative_operator(const JordanGenerator& gen, double d,
                                   double overflow_cap = kDefaultOverflowCap);

/// Replaces every complex entry a+bi by [[a, -b], [b, a]].
RealMatrix realify(const ComplexMatrix& m);

/// Bounded shear coordinate tau(d) = d / (1 + |d|/L), extended oddly to
/// negative arguments.
double bounded_tau(double d, double length);

/// Explicit pairwise stabilized kernel: the realified exponential with
/// tau(d)^r / r! in place of d^r / r! in every nilpotent channel.
RealMatrix stabilized_operator(const JordanGenerator& gen, double d, double length);

enum class OperatorFamily { Exact, Stabilized };

/// Frobenius norm of G(d1 + d2) - G(d1) G(d2) for the selected family.
double group_law_defect(const JordanGenerator& gen, double d1, double d2, OperatorFamily family,
                        double length);

/// [j_0 cos, j_0 sin, j_1 cos, j_1 sin, ...] with j_r = u^r e^{-rate d} and
/// u the generator's jet coordinate.
std::vector<double> jet_features(const JordanGenerator& gen, double d);

/// Realified operator entry (row, col) == coefficient * jet_features[feature].
/// feature < 0 marks an entry that is identically zero (below the diagonal).
struct JetCoefficient {
    int feature = -1;
    double coefficient = 0.0;
};

/// Row-major (2m x 2m) table of constants mapping jet features onto the
/// realified relative operator. The coefficient carries eta^r / r! explicitly.
std::vector<JetCoefficient> jet_coefficient_map(const JordanGenerator& gen);

struct JetCheck {
    Complex analytic;
    Complex numeric;
    double rel_error = 0.0;
};

/// Compares d^r/d omega^r e^{i omega d} = (i d)^r e^{i omega d} against a
/// fourth-order accurate central difference in omega. r must be 1, 2 or 3.
JetCheck frequency_jet_check(double omega, double d, int r, double h);

} // namespace jetrope
