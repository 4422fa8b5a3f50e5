#include "jetrope/jet_operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jetrope {

RelativeOperator jordan_exponential(Complex diagonal_exponent, double shear, int order,
                                    double overflow_cap) {
    if (order < 1) {
        throw std::invalid_argument("jordan_exponential: order must be at least 1");
    }
    const Complex scale = exp(diagonal_exponent);
    const double log_cap = std::log(overflow_cap);
    RelativeOperator out{ComplexMatrix(order, order), false};
    double coefficient = 1.0;
    for (int r = 0; r < order; ++r) {
        if (r > 0) {
            coefficient *= shear / r;
        }
        const Complex entry = scale * coefficient;
        for (int p = 0; p + r < order; ++p) {
            out.matrix(p, p + r) = entry;
        }
        double log_magnitude = diagonal_exponent.re;
        if (r > 0 && shear != 0.0) {
            log_magnitude += r * std::log(std::abs(shear)) - std::lgamma(r + 1.0);
        }
        if (log_magnitude > log_cap || !std::isfinite(entry.re) || !std::isfinite(entry.im)) {
            out.overflow = true;
        }
    }
    return out;
}

JordanGenerator::JordanGenerator(double gamma, double omega, double eta, int order, Variant variant)
    : gamma_(gamma), omega_(omega), eta_(eta), order_(order), variant_(variant) {
    if (!(gamma >= 0.0)) {
        throw std::invalid_argument("JordanGenerator: gamma must be nonnegative");
    }
    if (order < 1) {
        throw std::invalid_argument("JordanGenerator: order must be at least 1");
    }
    if (variant.kind == VariantKind::Scaled) {
        if (!(variant.length > 0.0)) {
            throw std::invalid_argument("JordanGenerator: scaled variant needs L > 0");
        }
        if (!(variant.c >= 0.0)) {
            throw std::invalid_argument("JordanGenerator: scaled variant needs c >= 0");
        }
    }
    if (!std::isfinite(omega) || !std::isfinite(eta)) {
        throw std::invalid_argument("JordanGenerator: omega and eta must be finite");
    }
}

JordanGenerator JordanGenerator::raw(double gamma, double omega, double eta, int order) {
    return {gamma, omega, eta, order, Variant::raw()};
}

JordanGenerator JordanGenerator::scaled(double c, double length, double omega, double eta, int order) {
    return {0.0, omega, eta, order, Variant::scaled(c, length)};
}

JordanGenerator JordanGenerator::damped(double gamma, double omega, int order) {
    return {gamma, omega, 0.0, order, Variant::damped()};
}

double JordanGenerator::damping_rate() const {
    return variant_.kind == VariantKind::Scaled ? variant_.c / variant_.length : gamma_;
}

double JordanGenerator::shear_rate() const {
    switch (variant_.kind) {
    case VariantKind::Scaled:
        return eta_ / variant_.length;
    case VariantKind::Damped:
        return 0.0;
    case VariantKind::Raw:
        break;
    }
    return eta_;
}

double JordanGenerator::jet_coordinate(double d) const {
    return variant_.kind == VariantKind::Scaled ? d / variant_.length : d;
}

LagGrid::LagGrid(std::vector<double> values, double train_cutoff)
    : values_(std::move(values)), train_cutoff_(train_cutoff) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0)) {
            throw std::invalid_argument("LagGrid: lags must be nonnegative");
        }
        if (i > 0 && !(values_[i] > values_[i - 1])) {
            throw std::invalid_argument("LagGrid: lags must be strictly increasing");
        }
    }
}

LagGrid LagGrid::integers(std::size_t count, double train_cutoff) {
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        values[i] = static_cast<double>(i);
    }
    return {std::move(values), train_cutoff};
}

std::size_t LagGrid::train_size() const {
    return static_cast<std::size_t>(
        std::count_if(values_.begin(), values_.end(), [&](double d) { return d < train_cutoff_; }));
}

ComplexMatrix generator_matrix(const JordanGenerator& gen) {
    const int m = gen.order();
    ComplexMatrix out(m, m);
    for (int p = 0; p < m; ++p) {
        out(p, p) = Complex(-gen.damping_rate(), gen.omega());
        if (p + 1 < m) {
            out(p, p + 1) = Complex(gen.shear_rate(), 0.0);
        }
    }
    return out;
}

RelativeOperator relative_operator(const JordanGenerator& gen, double d, double overflow_cap) {
    return jordan_exponential(Complex(-gen.damping_rate() * d, gen.omega() * d), gen.shear_rate() * d,
                              gen.order(), overflow_cap);
}

RealMatrix realify(const ComplexMatrix& m) {
    RealMatrix out(2 * m.rows(), 2 * m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const Complex z = m(i, j);
            out(2 * i, 2 * j) = z.re;
            out(2 * i, 2 * j + 1) = -z.im;
            out(2 * i + 1, 2 * j) = z.im;
            out(2 * i + 1, 2 * j + 1) = z.re;
        }
    }
    return out;
}

double bounded_tau(double d, double length) {
    if (!(length > 0.0)) {
        throw std::invalid_argument("bounded_tau: L must be positive");
    }
    return d / (1.0 + std::abs(d) / length);
}

RealMatrix stabilized_operator(const JordanGenerator& gen, double d, double length) {
    const double shear = gen.shear_rate() * bounded_tau(d, length);
    const auto exact = jordan_exponential(Complex(-gen.damping_rate() * d, gen.omega() * d), shear,
                                          gen.order(), kDefaultOverflowCap);
    return realify(exact.matrix);
}

double group_law_defect(const JordanGenerator& gen, double d1, double d2, OperatorFamily family,
                        double length) {
    if (family == OperatorFamily::Exact) {
        const ComplexMatrix joint = relative_operator(gen, d1 + d2).matrix;
        const ComplexMatrix split = relative_operator(gen, d1).matrix * relative_operator(gen, d2).matrix;
        return frobenius_norm(joint - split);
    }
    const RealMatrix joint = stabilized_operator(gen, d1 + d2, length);
    const RealMatrix split = stabilized_operator(gen, d1, length) * stabilized_operator(gen, d2, length);
    return frobenius_norm(joint - split);
}

std::vector<double> jet_features(const JordanGenerator& gen, double d) {
    const int m = gen.order();
    const double envelope = std::exp(-gen.damping_rate() * d);
    const double c = std::cos(gen.omega() * d);
    const double s = std::sin(gen.omega() * d);
    const double u = gen.jet_coordinate(d);
    std::vector<double> out(2 * m);
    double power = 1.0;
    for (int r = 0; r < m; ++r) {
        out[2 * r] = power * envelope * c;
        out[2 * r + 1] = power * envelope * s;
        power *= u;
    }
    return out;
}

std::vector<JetCoefficient> jet_coefficient_map(const JordanGenerator& gen) {
    const int m = gen.order();
    const int n = 2 * m;
    const double eta = gen.variant().kind == VariantKind::Damped ? 0.0 : gen.eta();
    std::vector<double> chain(m);
    chain[0] = 1.0;
    for (int r = 1; r < m; ++r) {
        chain[r] = chain[r - 1] * eta / r;
    }
    std::vector<JetCoefficient> out(static_cast<std::size_t>(n * n));
    for (int p = 0; p < m; ++p) {
        for (int q = p; q < m; ++q) {
            const int r = q - p;
            const int cos_feature = 2 * r;
            const int sin_feature = 2 * r + 1;
            out[(2 * p) * n + 2 * q] = {cos_feature, chain[r]};
            out[(2 * p) * n + 2 * q + 1] = {sin_feature, -chain[r]};
            out[(2 * p + 1) * n + 2 * q] = {sin_feature, chain[r]};
            out[(2 * p + 1) * n + 2 * q + 1] = {cos_feature, chain[r]};
        }
    }
    return out;
}

JetCheck frequency_jet_check(double omega, double d, int r, double h) {
    if (r < 1 || r > 3) {
        throw std::invalid_argument("frequency_jet_check: r must be 1, 2 or 3");
    }
    if (!(h > 0.0)) {
        throw std::invalid_argument("frequency_jet_check: step must be positive");
    }
    const auto character = [d](double w) { return Complex(std::cos(w * d), std::sin(w * d)); };
    const auto f = [&](int k) { return character(omega + k * h); };

    Complex numeric;
    switch (r) {
    case 1:
        numeric = (-f(2) + 8.0 * f(1) - 8.0 * f(-1) + f(-2)) * (1.0 / (12.0 * h));
        break;
    case 2:
        numeric = (-f(2) + 16.0 * f(1) - 30.0 * f(0) + 16.0 * f(-1) - f(-2)) * (1.0 / (12.0 * h * h));
        break;
    default:
        numeric = (-f(3) + 8.0 * f(2) - 13.0 * f(1) + 13.0 * f(-1) - 8.0 * f(-2) + f(-3)) *
                  (1.0 / (8.0 * h * h * h));
        break;
    }

    // (i d)^r
    Complex factor(1.0, 0.0);
    for (int k = 0; k < r; ++k) {
        factor = factor * Complex(0.0, d);
    }
    const Complex analytic = factor * character(omega);
    const double scale = abs(analytic);
    const double diff = abs(numeric - analytic);
    return {analytic, numeric, scale > 0.0 ? diff / scale : diff};
}

} // namespace jetrope
