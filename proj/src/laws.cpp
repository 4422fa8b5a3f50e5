#include "jetrope/laws.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "jetrope/factorize.hpp"
#include "jetrope/jet_operators.hpp"

namespace jetrope {

double uniform_from_bits(std::uint64_t bits, double lo, double hi) {
    const double unit = static_cast<double>(bits >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

namespace {

constexpr double kLength = 1024.0;

class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}
    double uniform(double lo, double hi) { return uniform_from_bits(rng_(), lo, hi); }
    int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    double sign() { return (rng_() >> 63) ? 1.0 : -1.0; }
    std::vector<double> unit_vector(std::size_t n) {
        std::vector<double> v(n);
        double s = 0.0;
        for (auto& x : v) {
            x = uniform(-1.0, 1.0);
            s += x * x;
        }
        for (auto& x : v) {
            x /= std::sqrt(s);
        }
        return v;
    }

private:
    std::mt19937_64 rng_;
};

void record(LawResult& r, double err, bool ok) {
    ++r.draws;
    if (!ok) {
        ++r.failures;
    }
    r.worst = std::max(r.worst, err);
}

JordanGenerator random_exact(Draw& draw, bool scaled) {
    const int m = draw.integer(1, 4);
    const double omega = draw.uniform(-std::numbers::pi, std::numbers::pi);
    const double eta = draw.uniform(-1.0, 1.0);
    if (scaled) {
        return JordanGenerator::scaled(draw.uniform(0.0, 2.0), kLength, omega, eta, m);
    }
    return JordanGenerator::raw(draw.uniform(0.0, 0.1), omega, eta, m);
}

// Random per-block parameters on the default frequency grid.
HeadLayout random_layout(Draw& draw, bool scaled) {
    const int m = draw.integer(1, 4);
    const int blocks = draw.integer(1, 3);
    HeadLayout layout = make_layout(2 * m * blocks, m, scaled ? Variant::scaled(1.0, kLength) : Variant::raw());
    for (auto& f : layout.frequencies) {
        f.raw.reset();
        if (scaled) {
            f.damping = draw.uniform(0.0, 1.5);
            f.eta = draw.uniform(-1.0, 1.0);
        } else {
            f.damping = draw.uniform(kDampingFloor, 0.05);
            f.eta = draw.uniform(-kEtaBound, kEtaBound);
        }
    }
    return layout;
}

} // namespace

LawResult check_exact_group_law(std::uint64_t seed, int draws) {
    LawResult r{"group_law_exact", 0, 0, 0.0, 1e-10};
    Draw draw(seed);
    for (int n = 0; n < draws; ++n) {
        const JordanGenerator gen = random_exact(draw, n % 2 == 1);
        const double d1 = draw.uniform(0.0, 64.0);
        const double d2 = draw.uniform(0.0, 64.0);
        const double ref = frobenius_norm(relative_operator(gen, d1 + d2).matrix);
        const double err = group_law_defect(gen, d1, d2, OperatorFamily::Exact, kLength) / ref;
        record(r, err, err < r.tolerance);
    }
    return r;
}

LawResult check_stabilized_group_defect(std::uint64_t seed, int draws) {
    // Lower bound check: a failure is a draw whose defect stays under the
    // threshold, and up to 5% of draws may do so.
    LawResult r{"group_law_stabilized_defect", 0, 0, 0.0, 1e-6};
    r.allowed_failures = draws / 20;
    r.worst = INFINITY;
    Draw draw(seed);
    for (int n = 0; n < draws; ++n) {
        const int m = draw.integer(2, 4);
        const double eta = draw.sign() * draw.uniform(0.01, 0.5);
        const JordanGenerator gen =
            JordanGenerator::raw(draw.uniform(0.0, 0.01), draw.uniform(-std::numbers::pi, std::numbers::pi), eta, m);
        const double d1 = draw.uniform(64.0, 512.0);
        const double d2 = draw.uniform(64.0, 512.0);
        const double defect = group_law_defect(gen, d1, d2, OperatorFamily::Stabilized, kLength);
        ++r.draws;
        if (!(defect > r.tolerance)) {
            ++r.failures;
        }
        r.worst = std::min(r.worst, defect);
    }
    return r;
}

LawResult check_scaled_score(std::uint64_t seed, int draws) {
    LawResult r{"score_identity_scaled", 0, 0, 0.0, 1e-8};
    Draw draw(seed);
    for (int n = 0; n < draws; ++n) {
        const HeadLayout layout = random_layout(draw, true);
        const auto q = draw.unit_vector(static_cast<std::size_t>(layout.head_dim));
        const auto k = draw.unit_vector(static_cast<std::size_t>(layout.head_dim));
        const std::int64_t i = draw.integer(0, 8192);
        const std::int64_t j = draw.integer(0, static_cast<int>(i));
        const double err = relative_score_check(layout, q, k, i, j).rel_error;
        record(r, err, err < r.tolerance);
    }
    return r;
}

LawResult check_raw_score(std::uint64_t seed, int draws) {
    LawResult r{"score_identity_raw", 0, 0, 0.0, 1e-8};
    Draw draw(seed);
    for (int n = 0; n < draws; ++n) {
        const HeadLayout layout = random_layout(draw, false);
        const auto q = draw.unit_vector(static_cast<std::size_t>(layout.head_dim));
        const auto k = draw.unit_vector(static_cast<std::size_t>(layout.head_dim));
        const std::int64_t i = draw.integer(0, 256);
        const std::int64_t j = draw.integer(0, static_cast<int>(i));
        const double err = relative_score_check(layout, q, k, i, j).rel_error;
        record(r, err, err < r.tolerance);
    }
    return r;
}

LawResult check_shift_invariance(std::uint64_t seed, int draws) {
    LawResult r{"shift_invariance", 0, 0, 0.0, 1e-8};
    Draw draw(seed);
    for (int n = 0; n < draws; ++n) {
        const bool scaled = n % 2 == 0;
        const HeadLayout layout = random_layout(draw, scaled);
        const auto q = draw.unit_vector(static_cast<std::size_t>(layout.head_dim));
        const auto k = draw.unit_vector(static_cast<std::size_t>(layout.head_dim));
        const int span = scaled ? 8192 - 2048 : 128;
        const int max_shift = scaled ? 2048 : 128;
        const std::int64_t i = draw.integer(0, span);
        const std::int64_t j = draw.integer(0, static_cast<int>(i));
        const std::int64_t s = draw.integer(0, max_shift);
        const ScoreCheck base = relative_score_check(layout, q, k, i, j);
        const ScoreCheck moved = relative_score_check(layout, q, k, i + s, j + s);
        const double err = std::abs(base.lhs - moved.lhs) / base.scale;
        record(r, err, err < r.tolerance);
    }
    return r;
}

LawResult check_center_invariance(std::uint64_t seed, int draws) {
    LawResult r{"center_invariance", 0, 0, 0.0, 1e-8};
    Draw draw(seed);
    for (int n = 0; n < draws; ++n) {
        const bool scaled = n % 2 == 0;
        const HeadLayout layout = random_layout(draw, scaled);
        const auto q = draw.unit_vector(static_cast<std::size_t>(layout.head_dim));
        const auto k = draw.unit_vector(static_cast<std::size_t>(layout.head_dim));
        const int window = scaled ? 8192 : 256;
        const std::int64_t i = draw.integer(0, window);
        const std::int64_t j = draw.integer(0, static_cast<int>(i));
        const ScoreCheck base = relative_score_check(layout, q, k, i, j, 0.0);
        for (double c0 : {window / 2.0, static_cast<double>(window)}) {
            const ScoreCheck centered = relative_score_check(layout, q, k, i, j, c0);
            const double err = std::max(std::abs(centered.lhs - base.lhs) / base.scale, centered.rel_error);
            record(r, err, err < r.tolerance);
        }
    }
    return r;
}

LawResult check_scalar_factor() {
    LawResult r{"scalar_factor_e8", 0, 0, 0.0, 0.1};
    const HeadLayout layout = make_layout(8, 2, Variant::scaled(1.0, kLength));
    const std::int64_t positions[] = {8192};
    const double factor = build_transform(layout, positions).max_scalar_factor();
    const double err = std::abs(factor / std::exp(8.0) - 1.0);
    record(r, err, err <= r.tolerance);
    return r;
}

LawResult check_stabilized_nonpurity(std::uint64_t seed, int draws) {
    // Existence check: passes once any shifted pair moves the score by more
    // than the tolerance; `worst` holds the largest relative change seen.
    LawResult r{"stabilized_shift_dependence", 0, 0, 0.0, 1e-3};
    Draw draw(seed);
    HeadLayout layout = make_layout(4, 2, Variant::raw());
    layout.factorization = Factorization::Stabilized;
    layout = with_uniform_params(layout, 0.001, 0.1);
    bool seen = false;
    for (int n = 0; n < draws; ++n) {
        const auto q = draw.unit_vector(4);
        const auto k = draw.unit_vector(4);
        const std::int64_t j = draw.integer(0, 512);
        const std::int64_t i = j + draw.integer(1, 512);
        const std::int64_t s = draw.integer(256, 2048);
        const ScoreCheck base = relative_score_check(layout, q, k, i, j);
        const ScoreCheck moved = relative_score_check(layout, q, k, i + s, j + s);
        const double change = std::abs(base.lhs - moved.lhs) / base.scale;
        r.worst = std::max(r.worst, change);
        seen = seen || change > r.tolerance;
        ++r.draws;
    }
    r.failures = seen ? 0 : 1;
    return r;
}

LawResult check_sigma_obstruction() {
    LawResult r{"sigma_obstruction", 0, 0, 0.0, 1e-12};
    const auto identity = [](double t) { return t; };
    const auto tau = [](double t) { return bounded_tau(t, kLength); };
    const double lin = sigma_obstruction(identity, 0.2, 10, 4);
    record(r, std::abs(lin - 1.2), std::abs(lin - 1.2) < r.tolerance);
    const double near = sigma_obstruction(tau, 0.2, 100, 50);
    const double far = sigma_obstruction(tau, 0.2, 1000, 950);
    // Equal lags must give different coefficients under the bounded coordinate.
    record(r, 0.0, std::abs(near - far) > 1e-3);
    const double zero = sigma_obstruction(tau, 0.0, 700, 3);
    record(r, std::abs(zero), zero == 0.0);
    return r;
}

LawResult check_frequency_jet(std::uint64_t seed, int order, int draws) {
    const double h = order == 1 ? 1e-4 : 1e-3;
    const double tol = order == 1 ? 1e-6 : 1e-4;
    LawResult r{"frequency_jet_r" + std::to_string(order), 0, 0, 0.0, tol};
    Draw draw(seed);
    for (int n = 0; n < draws; ++n) {
        const double omega = draw.uniform(-std::numbers::pi, std::numbers::pi);
        const double d = draw.uniform(1.0, 100.0);
        const double err = frequency_jet_check(omega, d, order, h).rel_error;
        record(r, err, err < r.tolerance);
    }
    return r;
}

LawResult check_coefficient_map(std::uint64_t seed, int draws) {
    LawResult r{"jet_coefficient_map", 0, 0, 0.0, 1e-10};
    Draw draw(seed);
    for (int n = 0; n < draws; ++n) {
        JordanGenerator gen = random_exact(draw, n % 3 == 1);
        if (n % 3 == 2) {
            gen = JordanGenerator::damped(draw.uniform(0.0, 0.1), gen.omega(), gen.order());
        }
        const double d = draw.uniform(0.0, 100.0);
        const RealMatrix op = realify(relative_operator(gen, d).matrix);
        const auto features = jet_features(gen, d);
        const auto map = jet_coefficient_map(gen);
        const std::size_t size = op.rows();
        double residual = 0.0;
        for (std::size_t row = 0; row < size; ++row) {
            for (std::size_t col = 0; col < size; ++col) {
                const JetCoefficient& c = map[row * size + col];
                const double predicted = c.feature < 0 ? 0.0 : c.coefficient * features[static_cast<std::size_t>(c.feature)];
                residual = std::max(residual, std::abs(op(row, col) - predicted));
            }
        }
        const double err = residual / std::max(1.0, frobenius_norm(op));
        record(r, err, err < r.tolerance);
    }
    return r;
}

std::vector<LawResult> run_all_laws(std::uint64_t seed) {
    return {
        check_exact_group_law(seed),
        check_stabilized_group_defect(seed + 1),
        check_scaled_score(seed + 2),
        check_raw_score(seed + 3),
        check_shift_invariance(seed + 4),
        check_center_invariance(seed + 5),
        check_scalar_factor(),
        check_stabilized_nonpurity(seed + 6),
        check_sigma_obstruction(),
        check_frequency_jet(seed + 7, 1),
        check_frequency_jet(seed + 8, 2),
        check_coefficient_map(seed + 9),
    };
}

} // namespace jetrope
