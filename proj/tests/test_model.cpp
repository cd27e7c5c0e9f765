#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "onebit/model.hpp"

using namespace onebit;

TEST_CASE("make_signal: degenerate and basic postconditions") {
    Rng rng(1);
    const SparseSignal one = make_signal(1, 1, rng);
    CHECK(one.support == std::vector<int>{0});
    CHECK(std::abs(one.values[0]) == doctest::Approx(1.0).epsilon(1e-12));

    const SparseSignal sig = make_signal(5, 2, rng);
    CHECK(sig.support.size() == 2);
    CHECK(sig.dense().norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(testing::nonzero_indices(sig.dense()).size() == 2);

    CHECK_THROWS_AS(make_signal(3, 4, rng), std::invalid_argument);
}

TEST_CASE("make_signal: deterministic given the stream") {
    Rng a(42), b(42);
    const SparseSignal s1 = make_signal(100, 7, a);
    const SparseSignal s2 = make_signal(100, 7, b);
    CHECK(s1.support == s2.support);
    CHECK(s1.values == s2.values);
}

TEST_CASE("make_signal: flat values have equal magnitudes") {
    Rng rng(9);
    const SparseSignal sig = make_signal(40, 5, rng, SignalValues::flat);
    for (int i = 0; i < 5; ++i)
        CHECK(std::abs(sig.values[i]) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
    CHECK(sig.dense().norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sample_matrix: iid case matches the identity covariance") {
    Rng rng(7);
    const int rows = 100000, n = 4;
    const SensingEnsemble ens = sample_matrix(rows, n, 0.0, rng);
    const Eigen::MatrixXd cov = ens.matrix.transpose() * ens.matrix / double(rows);
    CHECK((cov - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("sample_matrix: lag-1 correlation equals nu") {
    Rng rng(8);
    const SensingEnsemble ens = sample_matrix(100000, 2, 0.5, rng);
    const double corr = ens.matrix.col(0).dot(ens.matrix.col(1)) / 100000.0;
    CHECK(std::abs(corr - 0.5) < 0.01);
}

TEST_CASE("sample_matrix: AR(1) covariance entrywise at nu = 0.3") {
    Rng rng(11);
    const int rows = 100000, n = 6;
    const SensingEnsemble ens = sample_matrix(rows, n, 0.3, rng);
    const Eigen::MatrixXd cov = ens.matrix.transpose() * ens.matrix / double(rows);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            CHECK(std::abs(cov(j, k) - std::pow(0.3, std::abs(j - k))) < 0.02);
}

TEST_CASE("sample_matrix: parameter errors") {
    Rng rng(1);
    CHECK_THROWS_AS(sample_matrix(10, 3, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_matrix(10, 3, -0.1, rng), std::invalid_argument);
}

namespace {

// Observation with a hand-picked pre-quantization vector: a single unit
// coefficient turns the matrix column into Psi x*.
BinaryObservation observe_fixed(const Eigen::VectorXd& pre, double flip_prob, Rng& rng) {
    SensingEnsemble ens{pre, 0.0};
    SparseSignal sig{1, {0}, Eigen::VectorXd::Ones(1)};
    return observe(ens, sig, 0.0, flip_prob, rng);
}

} // namespace

TEST_CASE("observe: sign convention and total flips") {
    Rng rng(3);
    const auto clean = observe_fixed(Eigen::Vector3d(2.0, -1.0, 0.0), 0.0, rng);
    CHECK(clean.y == Eigen::Vector3d(1.0, -1.0, 1.0)); // sign(0) = +1
    CHECK(clean.pre_quant == Eigen::Vector3d(2.0, -1.0, 0.0));

    const auto flipped = observe_fixed(Eigen::Vector2d(2.0, -1.0), 1.0, rng);
    CHECK(flipped.y == Eigen::Vector2d(-1.0, 1.0));
}

TEST_CASE("observe: flip fraction concentrates") {
    Rng rng(5);
    const auto obs = observe_fixed(Eigen::VectorXd::Ones(100000), 0.05, rng);
    double frac = 0;
    for (auto b : obs.flip_mask) frac += b;
    frac /= 100000.0;
    CHECK(frac >= 0.045);
    CHECK(frac <= 0.055);
}

TEST_CASE("observe: reconstruction identity holds exactly") {
    Rng rng(17);
    const SparseSignal sig = make_signal(30, 4, rng);
    const SensingEnsemble ens = sample_matrix(50, 30, 0.4, rng);
    const BinaryObservation obs = observe(ens, sig, 0.3, 0.2, rng);
    for (int i = 0; i < 50; ++i) {
        const double sgn = obs.pre_quant[i] >= 0.0 ? 1.0 : -1.0;
        CHECK(obs.y[i] == (obs.flip_mask[size_t(i)] ? -sgn : sgn));
        CHECK(std::abs(obs.y[i]) == 1.0);
        // sign is positively homogeneous: scaling pre_quant never changes y
        for (double alpha : {0.5, 3.0}) {
            const double scaled = alpha * obs.pre_quant[i] >= 0.0 ? 1.0 : -1.0;
            CHECK(scaled == sgn);
        }
    }
}

TEST_CASE("observe: dimension mismatch") {
    Rng rng(2);
    const SparseSignal sig = make_signal(10, 2, rng);
    const SensingEnsemble ens = sample_matrix(5, 9, 0.0, rng);
    CHECK_THROWS_AS(observe(ens, sig, 0.0, 0.0, rng), std::invalid_argument);
}

TEST_CASE("effective_scale: closed-form values") {
    CHECK(effective_scale(0.0, 0.0) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-12));
    CHECK(effective_scale(3.0, 0.5) == 0.0);
    CHECK(effective_scale(0.2, 0.05) ==
          doctest::Approx(0.9 * std::sqrt(2.0 / (std::numbers::pi * 1.04))).epsilon(1e-12));
    CHECK(effective_scale(0.2, 0.05) == doctest::Approx(0.7041511635).epsilon(1e-9));
}

TEST_CASE("effective_scale: odd in (1-2q), decreasing in sigma") {
    for (double q : {0.0, 0.1, 0.3, 0.45}) {
        CHECK(effective_scale(0.7, q) == doctest::Approx(-effective_scale(0.7, 1.0 - q)).epsilon(1e-12));
    }
    double prev = effective_scale(0.0, 0.1);
    for (double sigma : {0.2, 0.5, 1.0, 2.0}) {
        const double cur = effective_scale(sigma, 0.1);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(std::abs(effective_scale(0.0, 0.0)) <= std::sqrt(2.0 / std::numbers::pi) + 1e-15);
}

TEST_CASE("haar: level-1 atoms") {
    const HaarTransform haar(1, 2);
    Eigen::Vector2d approx(std::numbers::sqrt2, 0.0), detail(0.0, std::numbers::sqrt2);
    CHECK((haar.synthesize(approx) - Eigen::Vector2d(1.0, 1.0)).norm() < 1e-12);
    CHECK((haar.synthesize(detail) - Eigen::Vector2d(1.0, -1.0)).norm() < 1e-12);
}

TEST_CASE("haar: analysis inverts synthesis") {
    Rng rng(21);
    std::normal_distribution<double> gauss;
    for (int level : {1, 2, 3}) {
        const HaarTransform haar(level, 8);
        Eigen::VectorXd c(8);
        for (int i = 0; i < 8; ++i) c[i] = gauss(rng);
        CHECK((haar.analyze(haar.synthesize(c)) - c).lpNorm<Eigen::Infinity>() < 1e-12);
        CHECK(haar.synthesize(c).norm() == doctest::Approx(c.norm()).epsilon(1e-12));
    }
}

TEST_CASE("haar: divisibility errors") {
    CHECK_THROWS_AS(HaarTransform(1, 3), std::invalid_argument);
    CHECK_THROWS_AS(HaarTransform(3, 12), std::invalid_argument);
}

TEST_CASE("wavelet_sensing_matrix equals gaussian times the synthesis matrix") {
    Rng rng(13);
    const int n = 8, m = 5;
    const HaarTransform haar(2, n);
    const SensingEnsemble g = sample_matrix(m, n, 0.0, rng);
    Eigen::MatrixXd synth(n, n);
    for (int j = 0; j < n; ++j) synth.col(j) = haar.synthesize(Eigen::VectorXd::Unit(n, j));
    const Eigen::MatrixXd expected = g.matrix * synth;
    CHECK((wavelet_sensing_matrix(g.matrix, haar) - expected).cwiseAbs().maxCoeff() < 1e-12);
}
