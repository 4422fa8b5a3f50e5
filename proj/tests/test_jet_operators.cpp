#include <doctest.h>

#include <cmath>
#include <random>

#include "jetrope/jet_operators.hpp"
#include "oracle.hpp"

using namespace jetrope;

namespace {

double rel_diff(const oracle::CMat& a, const oracle::CMat& b) { return (a - b).norm() / b.norm(); }

} // namespace

TEST_CASE("generator matrix transcribes diagonal and superdiagonal") {
    const auto scalar = generator_matrix(JordanGenerator::raw(0.0, 0.3, 0.0, 1));
    CHECK(scalar(0, 0).re == 0.0);
    CHECK(scalar(0, 0).im == 0.3);

    const auto raw = generator_matrix(JordanGenerator::raw(0.1, 0.5, 0.2, 2));
    CHECK(raw(0, 0).re == -0.1);
    CHECK(raw(0, 0).im == 0.5);
    CHECK(raw(1, 1).re == -0.1);
    CHECK(raw(0, 1).re == 0.2);
    CHECK(raw(0, 1).im == 0.0);
    CHECK(raw(1, 0).re == 0.0);

    const auto scaled = generator_matrix(JordanGenerator::scaled(1.0, 1024.0, 0.5, 0.2, 2));
    CHECK(scaled(0, 0).re == doctest::Approx(-1.0 / 1024).epsilon(1e-15));
    CHECK(scaled(0, 0).im == 0.5);
    CHECK(scaled(0, 1).re == doctest::Approx(0.2 / 1024).epsilon(1e-15));
}

TEST_CASE("generator rejects invalid parameters") {
    CHECK_THROWS_AS(JordanGenerator::raw(-0.1, 0.5, 0.1, 2), std::invalid_argument);
    CHECK_THROWS_AS(JordanGenerator::raw(0.1, 0.5, 0.1, 0), std::invalid_argument);
    CHECK_THROWS_AS(JordanGenerator::scaled(1.0, 0.0, 0.5, 0.1, 2), std::invalid_argument);
    CHECK_THROWS_AS(JordanGenerator::scaled(-1.0, 1024.0, 0.5, 0.1, 2), std::invalid_argument);
    CHECK(JordanGenerator::damped(0.1, 0.5, 3).shear_rate() == 0.0);
}

TEST_CASE("lag grid validates ordering") {
    CHECK_THROWS_AS(LagGrid({0.0, 2.0, 1.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(LagGrid({-1.0, 2.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(LagGrid({1.0, 1.0}, 1.0), std::invalid_argument);
    const auto grid = LagGrid::integers(8192, 1024);
    CHECK(grid.size() == 8192);
    CHECK(grid.train_size() == 1024);
}

TEST_CASE("relative operator closed form") {
    SUBCASE("zero lag is the identity") {
        const auto g = relative_operator(JordanGenerator::raw(0.2, 1.1, 0.7, 4), 0.0).matrix;
        for (std::size_t r = 0; r < 4; ++r) {
            for (std::size_t c = 0; c < 4; ++c) {
                CHECK(g(r, c).re == (r == c ? 1.0 : 0.0));
                CHECK(g(r, c).im == 0.0);
            }
        }
    }
    SUBCASE("pure shear") {
        const auto g = relative_operator(JordanGenerator::raw(0.0, 0.0, 1.0, 2), 3.0).matrix;
        CHECK(g(0, 0).re == 1.0);
        CHECK(g(0, 1).re == 3.0);
        CHECK(g(1, 0).re == 0.0);
        CHECK(g(1, 1).re == 1.0);
    }
    SUBCASE("matches the expm oracle at a fixed point") {
        const auto gen = JordanGenerator::raw(0.1, 0.5, 0.3, 3);
        CHECK(rel_diff(oracle::to_eigen(relative_operator(gen, 7.0).matrix), oracle::expm(gen, 7.0)) < 1e-9);
    }
    SUBCASE("strictly lower part is exactly zero and the pattern is (eta d)^r / r!") {
        const auto gen = JordanGenerator::raw(0.0, 0.0, 0.5, 4);
        const auto g = relative_operator(gen, 2.0).matrix;
        const double expected[] = {1.0, 1.0, 0.5, 1.0 / 6.0};
        for (std::size_t p = 0; p < 4; ++p) {
            for (std::size_t q = 0; q < 4; ++q) {
                if (q < p) {
                    CHECK(g(p, q).re == 0.0);
                    CHECK(g(p, q).im == 0.0);
                } else {
                    CHECK(g(p, q).re == doctest::Approx(expected[q - p]).epsilon(1e-15));
                }
            }
        }
    }
}

TEST_CASE("relative operator agrees with the expm oracle on random draws") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    for (int n = 0; n < 300; ++n) {
        const int m = 1 + static_cast<int>(rng() % 4);
        const bool scaled = n % 2 == 0;
        const auto gen = scaled ? JordanGenerator::scaled(2.0 * u(rng), 1024.0, 3.0 * (u(rng) - 0.5), 2.0 * u(rng) - 1.0, m)
                                : JordanGenerator::raw(0.2 * u(rng), 3.0 * (u(rng) - 0.5), 2.0 * u(rng) - 1.0, m);
        const double d = 64.0 * u(rng);
        const oracle::CMat ref = oracle::expm(gen, d);
        if ((oracle::generator(gen) * d).norm() > 20.0) {
            continue;
        }
        ++checked;
        CHECK(rel_diff(oracle::to_eigen(relative_operator(gen, d).matrix), ref) < 1e-9);
    }
    CHECK(checked > 100);
}

TEST_CASE("representation law holds for exact families") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 400; ++n) {
        const int m = 1 + static_cast<int>(rng() % 4);
        const auto gen = n % 2 ? JordanGenerator::raw(0.2 * u(rng), M_PI * u(rng), u(rng) - 0.5, m)
                               : JordanGenerator::scaled(2.0 * u(rng), 1024.0, M_PI * u(rng), u(rng) - 0.5, m);
        const double d1 = 64.0 * u(rng);
        const double d2 = 64.0 * u(rng);
        const double scale = frobenius_norm(relative_operator(gen, d1 + d2).matrix);
        CHECK(group_law_defect(gen, d1, d2, OperatorFamily::Exact, 1024.0) / scale < 1e-10);
    }
    CHECK(group_law_defect(JordanGenerator::raw(0.05, 0.4, 0.3, 3), 5, 9, OperatorFamily::Exact, 1024) < 1e-10);
    CHECK(group_law_defect(JordanGenerator::scaled(1.0, 1024.0, 0.4, 0.3, 4), 100, 412, OperatorFamily::Exact, 1024) <
          1e-10);
}

TEST_CASE("stabilized kernel breaks the group law") {
    const auto gen = JordanGenerator::raw(0.0, 0.3, 0.1, 2);
    const double defect = group_law_defect(gen, 512, 512, OperatorFamily::Stabilized, 1024);
    // tau(1024) = 512 versus 2 tau(512) = 2048/3; only the shear channel differs.
    const double shear_gap = 0.1 * (2.0 * 512.0 / 1.5 - 512.0);
    MESSAGE("stabilized defect at d1=d2=512: " << defect);
    CHECK(defect == doctest::Approx(std::sqrt(2.0) * shear_gap).epsilon(1e-12));
    CHECK(group_law_defect(JordanGenerator::raw(0.0, 0.3, 0.0, 2), 512, 512, OperatorFamily::Stabilized, 1024) <
          1e-12);
}

TEST_CASE("stabilized operator values") {
    const auto gen = JordanGenerator::raw(0.0, 0.3, 0.1, 2);
    const auto at_zero = stabilized_operator(gen, 0.0, 1024);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            CHECK(at_zero(r, c) == (r == c ? 1.0 : 0.0));
        }
    }
    const auto zero_rot = JordanGenerator::raw(0.0, 0.0, 0.1, 2);
    CHECK(stabilized_operator(zero_rot, 1024.0, 1024.0)(0, 2) == doctest::Approx(0.1 * 512.0).epsilon(1e-15));

    // Local agreement: the gap to the exact operator scales like d^2 / L.
    const auto shear = JordanGenerator::raw(0.0, 0.3, 0.5, 2);
    double previous = 0.0;
    for (double d : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
        const RealMatrix gap = stabilized_operator(shear, d, 1024) - realify(relative_operator(shear, d).matrix);
        const double ratio = frobenius_norm(gap) / (d * d / 1024.0);
        CHECK(ratio < 1.0);
        if (previous > 0.0) {
            CHECK(std::abs(ratio / previous - 1.0) < 0.5);
        }
        previous = ratio;
    }
}

TEST_CASE("bounded tau is odd, bounded, and first-order exact") {
    CHECK(bounded_tau(1024.0, 1024.0) == 512.0);
    CHECK(bounded_tau(-300.0, 1024.0) == -bounded_tau(300.0, 1024.0));
    CHECK(bounded_tau(1e9, 1024.0) < 1024.0);
    CHECK(std::abs(bounded_tau(1e-3, 1024.0) - 1e-3) < 1e-8);
}

TEST_CASE("realify maps complex action to interleaved real action") {
    const double phi = 0.7;
    ComplexMatrix one(1, 1);
    one(0, 0) = exp(Complex{0.0, phi});
    const auto rot = oracle::to_eigen(realify(one));
    CHECK((rot - oracle::rotation(phi)).norm() < 1e-15);

    const auto id = realify(ComplexMatrix::identity(3));
    CHECK((oracle::to_eigen(id) - Eigen::MatrixXd::Identity(6, 6)).norm() == 0.0);

    // Order-two realified block: e^{-gamma d} [[R, eta d R], [0, R]].
    const double gamma = 0.05, omega = 0.4, eta = 0.1, d = 10.0;
    const auto block = oracle::to_eigen(realify(relative_operator(JordanGenerator::raw(gamma, omega, eta, 2), d).matrix));
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(4, 4);
    const Eigen::Matrix2d r = std::exp(-gamma * d) * oracle::rotation(omega * d);
    expected.block<2, 2>(0, 0) = r;
    expected.block<2, 2>(0, 2) = eta * d * r;
    expected.block<2, 2>(2, 2) = r;
    CHECK((block - expected).norm() < 1e-14);
}

TEST_CASE("realify is a homomorphism on one-parameter products") {
    const auto gen = JordanGenerator::raw(0.03, 0.9, 0.4, 3);
    const auto a = relative_operator(gen, 3.5).matrix;
    const auto b = relative_operator(gen, 11.25).matrix;
    const Eigen::MatrixXd lhs = oracle::to_eigen(realify(a * b));
    const Eigen::MatrixXd rhs = oracle::to_eigen(realify(a)) * oracle::to_eigen(realify(b));
    CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("overflow is flagged instead of returning infinities") {
    const auto gen = JordanGenerator::raw(0.05, 0.4, 0.1, 2);
    CHECK_FALSE(relative_operator(gen, 100.0).overflow);
    const auto huge = relative_operator(gen, -5000.0);
    CHECK(huge.overflow);
    CHECK(relative_operator(JordanGenerator::raw(0.0, 0.4, 1.0, 4), 1e12).overflow);
}

TEST_CASE("jet features") {
    const auto rope = jet_features(JordanGenerator::raw(0.0, 0.3, 0.0, 1), 5.0);
    CHECK(rope[0] == doctest::Approx(std::cos(1.5)).epsilon(1e-15));
    CHECK(rope[1] == doctest::Approx(std::sin(1.5)).epsilon(1e-15));

    const auto zero = jet_features(JordanGenerator::raw(0.1, 0.3, 0.5, 2), 0.0);
    CHECK(zero == std::vector<double>{1.0, 0.0, 0.0, 0.0});

    const auto scaled = JordanGenerator::scaled(0.5, 1024.0, 0.3, 0.2, 2);
    const auto f = jet_features(scaled, 2048.0);
    CHECK(f[2] == doctest::Approx(2.0 * std::exp(-1.0) * std::cos(0.3 * 2048.0)).epsilon(1e-13));
}

TEST_CASE("operator entries are constant combinations of jet features") {
    // Solve for the constants on one lag by least squares against the feature
    // vector, then check them on 100 other lags.
    const auto gen = JordanGenerator::raw(0.02, 0.45, 0.3, 3);
    const std::size_t n = 6;
    const auto map = jet_coefficient_map(gen);
    for (int k = 0; k < 100; ++k) {
        const double d = 0.37 * (k + 1);
        const auto op = realify(relative_operator(gen, d).matrix);
        const auto feats = jet_features(gen, d);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                const auto& entry = map[r * n + c];
                const double predicted = entry.feature < 0 ? 0.0 : entry.coefficient * feats[entry.feature];
                CHECK(std::abs(op(r, c) - predicted) < 1e-10);
            }
        }
    }
    // At d = 37 the first row carries eta^r / r! times the features.
    const auto op = realify(relative_operator(gen, 37.0).matrix);
    const auto feats = jet_features(gen, 37.0);
    CHECK(op(0, 0) == doctest::Approx(feats[0]).epsilon(1e-13));
    CHECK(op(0, 2) == doctest::Approx(0.3 * feats[2]).epsilon(1e-13));
    CHECK(op(0, 4) == doctest::Approx(0.09 / 2.0 * feats[4]).epsilon(1e-13));
    CHECK(op(1, 4) == doctest::Approx(0.09 / 2.0 * feats[5]).epsilon(1e-13));
}

TEST_CASE("frequency jet finite differences") {
    const auto zero = frequency_jet_check(0.3, 0.0, 1, 1e-4);
    CHECK(abs(zero.analytic) == 0.0);
    CHECK(abs(zero.numeric) < 1e-8);
    CHECK(frequency_jet_check(0.3, 50.0, 1, 1e-4).rel_error < 1e-6);
    CHECK(frequency_jet_check(0.7, 20.0, 2, 1e-3).rel_error < 1e-4);
    const auto third = frequency_jet_check(0.7, 10.0, 3, 1e-3);
    CHECK(third.rel_error < 1e-4);
    // (i d)^3 = -i d^3.
    const Complex expected = Complex{0.0, -1000.0} * exp(Complex{0.0, 7.0});
    CHECK(abs(third.analytic - expected) < 1e-10);
    CHECK_THROWS_AS(frequency_jet_check(0.7, 10.0, 4, 1e-3), std::invalid_argument);
}
