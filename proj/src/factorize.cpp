#include "jetrope/factorize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jetrope {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double inverse_softplus(double y) {
    if (!(y > 0.0)) {
        throw std::invalid_argument("inverse_softplus: argument must be positive");
    }
    return y > 30.0 ? y + std::log(-std::expm1(-y)) : std::log(std::expm1(y));
}

double constrained_gamma(const RawParams& raw) { return softplus(raw.a) + kDampingFloor; }

double constrained_eta(const RawParams& raw) { return kEtaBound * std::tanh(raw.b); }

RawParams raw_params_for(double gamma, double eta) {
    if (!(gamma > kDampingFloor)) {
        throw std::invalid_argument("raw_params_for: gamma must exceed the 1e-4 floor");
    }
    if (!(std::abs(eta) < kEtaBound)) {
        throw std::invalid_argument("raw_params_for: |eta| must be below 0.1");
    }
    return {inverse_softplus(gamma - kDampingFloor), std::atanh(eta / kEtaBound)};
}

void HeadLayout::validate() const {
    if (order < 1) {
        throw std::invalid_argument("HeadLayout: order must be at least 1");
    }
    if (head_dim <= 0 || head_dim % (2 * order) != 0) {
        throw std::invalid_argument("HeadLayout: head_dim " + std::to_string(head_dim) +
                                    " is not divisible by 2m = " + std::to_string(2 * order));
    }
    if (frequencies.size() != static_cast<std::size_t>(head_dim / (2 * order))) {
        throw std::invalid_argument("HeadLayout: need head_dim / (2m) frequencies");
    }
    if (variant.kind == VariantKind::Scaled && !(variant.length > 0.0)) {
        throw std::invalid_argument("HeadLayout: scaled variant needs L > 0");
    }
    if (factorization == Factorization::Stabilized && !(tau_length > 0.0)) {
        throw std::invalid_argument("HeadLayout: tau_length must be positive");
    }
    for (const auto& f : frequencies) {
        if (!(f.damping >= 0.0)) {
            throw std::invalid_argument("HeadLayout: damping must be nonnegative");
        }
    }
}

JordanGenerator HeadLayout::generator(std::size_t block) const {
    const FrequencyParams& f = frequencies.at(block);
    switch (variant.kind) {
    case VariantKind::Scaled:
        return JordanGenerator::scaled(f.damping, variant.length, f.omega, f.eta, order);
    case VariantKind::Damped:
        return JordanGenerator::damped(f.damping, f.omega, order);
    case VariantKind::Raw:
        break;
    }
    return JordanGenerator::raw(f.damping, f.omega, f.eta, order);
}

std::vector<double> default_frequencies(int head_dim, int count, double theta) {
    std::vector<double> out(count);
    for (int k = 0; k < count; ++k) {
        out[k] = std::pow(theta, -2.0 * k / head_dim);
    }
    return out;
}

HeadLayout make_layout(int head_dim, int order, Variant variant, double eta0, double theta) {
    if (order < 1 || head_dim <= 0 || head_dim % (2 * order) != 0) {
        throw std::invalid_argument("make_layout: head_dim must be a positive multiple of 2m");
    }
    HeadLayout layout;
    layout.head_dim = head_dim;
    layout.order = order;
    layout.theta = theta;
    layout.variant = variant;
    const int count = head_dim / (2 * order);
    const double gamma0 = 0.01;
    const double eta = variant.kind == VariantKind::Damped ? 0.0 : eta0;
    for (double omega : default_frequencies(head_dim, count, theta)) {
        FrequencyParams f;
        f.omega = omega;
        f.eta = eta;
        if (variant.kind == VariantKind::Scaled) {
            f.damping = variant.c;
        } else {
            f.damping = gamma0;
            if (std::abs(eta) < kEtaBound) {
                f.raw = raw_params_for(gamma0, eta);
            }
        }
        layout.frequencies.push_back(f);
    }
    return layout;
}

HeadLayout with_uniform_params(HeadLayout layout, double damping, double eta) {
    for (auto& f : layout.frequencies) {
        f.damping = damping;
        f.eta = layout.variant.kind == VariantKind::Damped ? 0.0 : eta;
        f.raw.reset();
    }
    return layout;
}

PositionwiseTransform::PositionwiseTransform(std::size_t positions, std::size_t blocks, std::size_t block_size)
    : positions_(positions), blocks_(blocks), block_size_(block_size), keys_(positions * blocks),
      queries_(positions * blocks) {}

std::size_t PositionwiseTransform::index(std::size_t position, std::size_t block) const {
    if (position >= positions_ || block >= blocks_) {
        throw std::out_of_range("PositionwiseTransform: index out of range");
    }
    return position * blocks_ + block;
}

const RealMatrix& PositionwiseTransform::key_block(std::size_t position, std::size_t block) const {
    return keys_[index(position, block)];
}

const RealMatrix& PositionwiseTransform::query_block(std::size_t position, std::size_t block) const {
    return queries_[index(position, block)];
}

namespace {

std::vector<double> apply_blocks(const std::vector<RealMatrix>& blocks, std::size_t first, std::size_t count,
                                 std::size_t block_size, std::span<const double> x) {
    if (x.size() != count * block_size) {
        throw std::invalid_argument("PositionwiseTransform: vector length does not match head_dim");
    }
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t b = 0; b < count; ++b) {
        const RealMatrix& m = blocks[first + b];
        const std::size_t offset = b * block_size;
        for (std::size_t r = 0; r < block_size; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < block_size; ++c) {
                acc += m(r, c) * x[offset + c];
            }
            out[offset + r] = acc;
        }
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

} // namespace

std::vector<double> PositionwiseTransform::apply_key(std::size_t position, std::span<const double> k) const {
    return apply_blocks(keys_, index(position, 0), blocks_, block_size_, k);
}

std::vector<double> PositionwiseTransform::apply_query(std::size_t position, std::span<const double> q) const {
    return apply_blocks(queries_, index(position, 0), blocks_, block_size_, q);
}

PositionwiseTransform build_transform(const HeadLayout& layout, std::span<const std::int64_t> positions,
                                      std::optional<double> center) {
    layout.validate();
    PositionwiseTransform out(positions.size(), layout.block_count(), layout.block_size());
    const double shift = center.value_or(0.0);
    for (std::size_t p = 0; p < positions.size(); ++p) {
        const double t = static_cast<double>(positions[p]) - shift;
        for (std::size_t b = 0; b < layout.block_count(); ++b) {
            const JordanGenerator gen = layout.generator(b);
            const double rate = gen.damping_rate();
            // A(t) = e^{z} U with z = -(-rate + i omega) t; the inverse flips z and the
            // nilpotent coordinate, which is the closed-form triangular inverse of U.
            const Complex forward_exponent(rate * t, -gen.omega() * t);
            const double nilpotent = layout.factorization == Factorization::Exact
                                         ? gen.shear_rate() * (-t)
                                         : gen.shear_rate() * bounded_tau(-t, layout.tau_length);
            const RelativeOperator forward = jordan_exponential(forward_exponent, nilpotent, layout.order);
            const RelativeOperator inverse = jordan_exponential(-forward_exponent, -nilpotent, layout.order);
            const std::size_t slot = out.index(p, b);
            out.keys_[slot] = realify(forward.matrix);
            out.queries_[slot] = realify(inverse.matrix).transposed();
            out.overflow_ = out.overflow_ || forward.overflow || inverse.overflow;
            out.max_scalar_factor_ = std::max(out.max_scalar_factor_, std::exp(std::abs(rate * t)));
        }
    }
    return out;
}

double default_center(std::span<const std::int64_t> positions) {
    if (positions.empty()) {
        return 0.0;
    }
    const auto [lo, hi] = std::minmax_element(positions.begin(), positions.end());
    return 0.5 * (static_cast<double>(*lo) + static_cast<double>(*hi));
}

TransformedPair apply(const HeadLayout& layout, const AttentionTensors& tensors, std::optional<double> center) {
    layout.validate();
    if (tensors.head_dim != static_cast<std::size_t>(layout.head_dim)) {
        throw std::invalid_argument("apply: tensor head_dim does not match layout");
    }
    const std::size_t rows = tensors.batch * tensors.heads * tensors.time;
    const std::size_t expected = rows * tensors.head_dim;
    if (tensors.q.size() != expected || tensors.k.size() != expected) {
        throw std::invalid_argument("apply: q/k size does not match batch x heads x time x head_dim");
    }
    if (tensors.positions.size() != tensors.time) {
        throw std::invalid_argument("apply: need one position per time step");
    }
    const PositionwiseTransform transform = build_transform(layout, tensors.positions, center);
    TransformedPair out{std::vector<double>(expected), std::vector<double>(expected)};
    const std::size_t dh = tensors.head_dim;
    for (std::size_t row = 0; row < rows; ++row) {
        const std::size_t t = row % tensors.time;
        const std::span<const double> q(tensors.q.data() + row * dh, dh);
        const std::span<const double> k(tensors.k.data() + row * dh, dh);
        const auto qt = transform.apply_query(t, q);
        const auto kt = transform.apply_key(t, k);
        std::copy(qt.begin(), qt.end(), out.q.begin() + static_cast<std::ptrdiff_t>(row * dh));
        std::copy(kt.begin(), kt.end(), out.k.begin() + static_cast<std::ptrdiff_t>(row * dh));
    }
    return out;
}

std::vector<RealMatrix> relative_kernel(const HeadLayout& layout, double lag) {
    layout.validate();
    std::vector<RealMatrix> out;
    out.reserve(layout.block_count());
    for (std::size_t b = 0; b < layout.block_count(); ++b) {
        const JordanGenerator gen = layout.generator(b);
        if (layout.factorization == Factorization::Exact) {
            out.push_back(realify(relative_operator(gen, lag).matrix));
        } else {
            out.push_back(stabilized_operator(gen, lag, layout.tau_length));
        }
    }
    return out;
}

ScoreCheck relative_score_check(const HeadLayout& layout, std::span<const double> q, std::span<const double> k,
                                std::int64_t i, std::int64_t j, std::optional<double> center) {
    const std::int64_t positions[] = {i, j};
    const PositionwiseTransform transform = build_transform(layout, positions, center);
    const auto qt = transform.apply_query(0, q);
    const auto kt = transform.apply_key(1, k);

    const auto kernel = relative_kernel(layout, static_cast<double>(i - j));
    const std::size_t bs = layout.block_size();
    std::vector<double> gk(k.size(), 0.0);
    for (std::size_t b = 0; b < kernel.size(); ++b) {
        const auto part = multiply(kernel[b], k.subspan(b * bs, bs));
        std::copy(part.begin(), part.end(), gk.begin() + static_cast<std::ptrdiff_t>(b * bs));
    }

    ScoreCheck out;
    out.lhs = dot(qt, kt);
    out.rhs = dot(q, gk);
    out.scale = norm(q) * norm(gk);
    const double diff = std::abs(out.lhs - out.rhs);
    out.rel_error = out.scale > 0.0 ? diff / out.scale : diff;
    return out;
}

double sigma_obstruction(const std::function<double(double)>& sigma, double eta, std::int64_t i, std::int64_t j) {
    return eta * (sigma(-static_cast<double>(j)) - sigma(-static_cast<double>(i)));
}

NormProfile norm_profile(const HeadLayout& layout, std::span<const std::int64_t> positions) {
    const PositionwiseTransform transform = build_transform(layout, positions);
    const std::vector<double> probe(layout.head_dim, 1.0 / std::sqrt(static_cast<double>(layout.head_dim)));
    NormProfile out;
    double q0 = 0.0;
    double k0 = 0.0;
    for (std::size_t p = 0; p < positions.size(); ++p) {
        const double qn = norm(transform.apply_query(p, probe));
        const double kn = norm(transform.apply_key(p, probe));
        if (p == 0) {
            q0 = qn;
            k0 = kn;
        }
        out.query_ratio.push_back(qn / q0);
        out.key_ratio.push_back(kn / k0);
    }
    return out;
}

double condition_bound(const HeadLayout& layout, std::int64_t position) {
    const std::int64_t positions[] = {position};
    const PositionwiseTransform transform = build_transform(layout, positions);
    double forward = 0.0;
    double inverse = 0.0;
    for (std::size_t b = 0; b < transform.blocks(); ++b) {
        forward = std::max(forward, frobenius_norm(transform.key_block(0, b)));
        inverse = std::max(inverse, frobenius_norm(transform.query_block(0, b)));
    }
    return forward * inverse;
}

} // namespace jetrope
