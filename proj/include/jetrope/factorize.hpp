#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "jetrope/jet_operators.hpp"
#include "jetrope/matrix.hpp"

namespace jetrope {

/// Unconstrained parameters; gamma = softplus(a) + 1e-4, eta = 0.1 tanh(b).
struct RawParams {
    double a = 0.0;
    double b = 0.0;
};

inline constexpr double kDampingFloor = 1e-4;
inline constexpr double kEtaBound = 0.1;

double softplus(double x);
double inverse_softplus(double y);

/// Constrained damping and nilpotent amplitude from raw parameters.
double constrained_gamma(const RawParams& raw);
double constrained_eta(const RawParams& raw);
/// Raw parameters reproducing a given (gamma, eta); requires gamma > 1e-4 and |eta| < 0.1.
RawParams raw_params_for(double gamma, double eta);

/// Per-frequency block parameters. `damping` is gamma for Raw and Damped
/// layouts and the constant c for Scaled ones.
struct FrequencyParams {
    double omega = 0.0;
    double damping = 0.0;
    double eta = 0.0;
    std::optional<RawParams> raw;
};

enum class Factorization {
    Exact,      ///< A(t) = G(-t) from the one-parameter family.
    Stabilized, ///< Bounded-tau unipotent factors applied position by position.
};

struct HeadLayout {
    int head_dim = 0;
    int order = 1;
    double theta = 10000.0;
    Variant variant = Variant::raw();
    Factorization factorization = Factorization::Exact;
    /// L in tau(t) = t / (1 + |t|/L) for the stabilized factorization.
    double tau_length = 1024.0;
    std::vector<FrequencyParams> frequencies;

    std::size_t block_size() const { return static_cast<std::size_t>(2 * order); }
    std::size_t block_count() const { return frequencies.size(); }

    /// Throws std::invalid_argument naming the broken invariant.
    void validate() const;
    JordanGenerator generator(std::size_t block) const;
};

/// omega_k = theta^{-2k/d_h} for k = 0 .. count-1.
std::vector<double> default_frequencies(int head_dim, int count, double theta);

/// Layout on the default grid with d_h / (2m) frequencies. Damping defaults to
/// gamma = 0.01 (or the variant's c for Scaled), eta to eta0; for Raw layouts
/// the matching raw (a, b) are stored when eta0 lies inside the constraint.
HeadLayout make_layout(int head_dim, int order, Variant variant, double eta0 = 0.01,
                       double theta = 10000.0);

/// Same damping and eta in every block.
HeadLayout with_uniform_params(HeadLayout layout, double damping, double eta);

/// Per-position block-diagonal maps: keys use A(t), queries use A(t)^{-T}.
class PositionwiseTransform {
public:
    PositionwiseTransform(std::size_t positions, std::size_t blocks, std::size_t block_size);

    std::size_t positions() const { return positions_; }
    std::size_t blocks() const { return blocks_; }
    std::size_t block_size() const { return block_size_; }

    const RealMatrix& key_block(std::size_t position, std::size_t block) const;
    const RealMatrix& query_block(std::size_t position, std::size_t block) const;

    /// Largest |scalar| or 1/|scalar| over all blocks: the absolute rescaling
    /// carried by either side before it cancels in the score.
    double max_scalar_factor() const { return max_scalar_factor_; }
    bool overflow() const { return overflow_; }

    std::vector<double> apply_key(std::size_t position, std::span<const double> k) const;
    std::vector<double> apply_query(std::size_t position, std::span<const double> q) const;

private:
    friend PositionwiseTransform build_transform(const HeadLayout&, std::span<const std::int64_t>,
                                                 std::optional<double>);

    std::size_t index(std::size_t position, std::size_t block) const;

    std::size_t positions_;
    std::size_t blocks_;
    std::size_t block_size_;
    std::vector<RealMatrix> keys_;
    std::vector<RealMatrix> queries_;
    double max_scalar_factor_ = 1.0;
    bool overflow_ = false;
};

/// Builds A(t - center) for every position. Inverses are taken in closed form
/// (conjugate rotation, reciprocal scalar, negated nilpotent coordinate).
PositionwiseTransform build_transform(const HeadLayout& layout, std::span<const std::int64_t> positions,
                                      std::optional<double> center = std::nullopt);

/// (min + max) / 2 of the positions.
double default_center(std::span<const std::int64_t> positions);

struct AttentionTensors {
    std::size_t batch = 0;
    std::size_t heads = 0;
    std::size_t time = 0;
    std::size_t head_dim = 0;
    std::vector<double> q; ///< batch x heads x time x head_dim, row-major
    std::vector<double> k;
    std::vector<std::int64_t> positions;
};

struct TransformedPair {
    std::vector<double> q;
    std::vector<double> k;
};

TransformedPair apply(const HeadLayout& layout, const AttentionTensors& tensors,
                      std::optional<double> center = std::nullopt);

struct ScoreCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    /// |q| |G(i-j) k|, the normalizer of rel_error.
    double scale = 0.0;
    /// |lhs - rhs| / scale.
    double rel_error = 0.0;
};

/// Position-wise score <A(i)^{-T} q, A(j) k> against q^T G(i-j) k with the
/// explicit realified relative kernel (G_stab for stabilized layouts).
ScoreCheck relative_score_check(const HeadLayout& layout, std::span<const double> q,
                                std::span<const double> k, std::int64_t i, std::int64_t j,
                                std::optional<double> center = std::nullopt);

/// Explicit block-diagonal relative kernel for one lag.
std::vector<RealMatrix> relative_kernel(const HeadLayout& layout, double lag);

/// Nilpotent coefficient of B_sigma(-i)^{-1} B_sigma(-j): eta (sigma(-j) - sigma(-i)).
double sigma_obstruction(const std::function<double(double)>& sigma, double eta, std::int64_t i,
                         std::int64_t j);

struct NormProfile {
    std::vector<double> query_ratio;
    std::vector<double> key_ratio;
};

/// |A(t)^{-T} e| and |A(t) e| relative to their values at the first position,
/// for the probe e = (1, ..., 1) / sqrt(d_h).
NormProfile norm_profile(const HeadLayout& layout, std::span<const std::int64_t> positions);

/// max_k |A_k(t)|_F * max_k |A_k(t)^{-1}|_F, an upper bound on cond_2(A(t)).
double condition_bound(const HeadLayout& layout, std::int64_t position);

} // namespace jetrope
