#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "helpers.hpp"
#include "onebit/baselines.hpp"
#include "onebit/model.hpp"
#include "onebit/solver.hpp"

using namespace onebit;

TEST_CASE("biht: consistent sign pattern is a fixed point of the update map") {
    Rng rng(31);
    const SparseSignal sig = make_signal(12, 3, rng);
    const SensingEnsemble ens = sample_matrix(60, 12, 0.0, rng);
    const Eigen::VectorXd x = sig.dense();
    Eigen::VectorXd y(60), sgn(60);
    const Eigen::VectorXd px = ens.matrix * x;
    for (int i = 0; i < 60; ++i) y[i] = sgn[i] = px[i] >= 0.0 ? 1.0 : -1.0;
    // subgradient term y - sign(Psi x) vanishes, so one update leaves x unchanged
    const Eigen::VectorXd stepped =
        hard_threshold(x + (1.0 / 60.0) * (ens.matrix.transpose() * (y - sgn)) / 2.0, 3);
    CHECK(stepped == x);
}

TEST_CASE("biht: zero iterations returns the zero vector") {
    Rng rng(32);
    const SensingEnsemble ens = sample_matrix(10, 5, 0.0, rng);
    BihtOptions opts;
    opts.s = 2;
    opts.max_iter = 0;
    const BihtResult res = biht(ens.matrix, Eigen::VectorXd::Ones(10), opts);
    CHECK(res.x == Eigen::VectorXd::Zero(5));
    CHECK(res.iterations == 0);
}

TEST_CASE("biht: sparsity and unit norm of the normalized output") {
    Rng rng(33);
    const SparseSignal sig = make_signal(25, 4, rng);
    const SensingEnsemble ens = sample_matrix(120, 25, 0.1, rng);
    const BinaryObservation obs = observe(ens, sig, 0.1, 0.02, rng);
    BihtOptions opts;
    opts.s = 4;
    const BihtResult res = biht(ens.matrix, obs.y, opts);
    CHECK(testing::nonzero_indices(res.x).size() <= 4);
    CHECK(res.x.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("biht: noiseless support recovery rate") {
    int hits = 0;
    for (int t = 0; t < 100; ++t) {
        Rng rng = make_stream(7100, 0, std::uint64_t(t));
        const SparseSignal sig = make_signal(20, 2, rng);
        const SensingEnsemble ens = sample_matrix(400, 20, 0.0, rng);
        const BinaryObservation obs = observe(ens, sig, 0.0, 0.0, rng);
        BihtOptions opts;
        opts.s = 2;
        hits += testing::nonzero_indices(biht(ens.matrix, obs.y, opts).x) == sig.support;
    }
    CHECK(hits >= 90);
}

TEST_CASE("project_l1_ball: matches a bisection oracle") {
    Rng rng(34);
    std::normal_distribution<double> gauss;
    for (int t = 0; t < 60; ++t) {
        Eigen::VectorXd v(10);
        for (int i = 0; i < 10; ++i) v[i] = 3.0 * gauss(rng);
        const double radius = 0.3 + 2.0 * double(rng() % 100) / 100.0;
        const Eigen::VectorXd w = project_l1_ball(v, radius);
        if (v.lpNorm<1>() <= radius) {
            CHECK(w == v);
            continue;
        }
        // oracle: soft threshold at theta found by bisection on the l1 norm
        double lo = 0.0, hi = v.cwiseAbs().maxCoeff();
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            double norm1 = 0.0;
            for (int i = 0; i < 10; ++i) norm1 += std::max(std::abs(v[i]) - mid, 0.0);
            (norm1 > radius ? lo : hi) = mid;
        }
        for (int i = 0; i < 10; ++i) {
            const double expect = std::copysign(std::max(std::abs(v[i]) - hi, 0.0), v[i]);
            CHECK(w[i] == doctest::Approx(expect).epsilon(1e-9));
        }
        CHECK(w.lpNorm<1>() <= radius + 1e-9);
    }
}

TEST_CASE("lp_estimate: interior point is returned unchanged") {
    Eigen::MatrixXd psi(1, 3);
    psi << 0.3, 0.0, 0.0;
    const Eigen::VectorXd y = Eigen::VectorXd::Ones(1);
    CHECK(lp_estimate(psi, y, 1) == Eigen::Vector3d(0.3, 0.0, 0.0));
}

TEST_CASE("lp_estimate: single spike lands on the ball boundary") {
    Eigen::MatrixXd psi(1, 4);
    psi << 10.0, 0.0, 0.0, 0.0;
    const Eigen::VectorXd y = Eigen::VectorXd::Ones(1);
    const Eigen::VectorXd w = lp_estimate(psi, y, 1);
    CHECK((w - Eigen::Vector4d(1.0, 0.0, 0.0, 0.0)).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("lp_estimate: output stays in K") {
    Rng rng(35);
    for (int t = 0; t < 25; ++t) {
        const int s = 1 + int(rng() % 4);
        const SparseSignal sig = make_signal(30, s, rng);
        const SensingEnsemble ens = sample_matrix(100, 30, 0.3, rng);
        const BinaryObservation obs = observe(ens, sig, 0.2, 0.1, rng);
        const Eigen::VectorXd w = lp_estimate(ens.matrix, obs.y, s);
        CHECK(w.lpNorm<1>() <= std::sqrt(double(s)) + 1e-9);
        CHECK(w.norm() <= 1.0 + 1e-9);
    }
}

TEST_CASE("lp_estimate: positive correlation with the truth") {
    int positive = 0;
    for (int t = 0; t < 100; ++t) {
        Rng rng = make_stream(7200, 0, std::uint64_t(t));
        const SparseSignal sig = make_signal(50, 3, rng);
        const SensingEnsemble ens = sample_matrix(2000, 50, 0.0, rng);
        const BinaryObservation obs = observe(ens, sig, 0.0, 0.0, rng);
        positive += lp_estimate(ens.matrix, obs.y, 3).dot(sig.dense()) > 0.0;
    }
    CHECK(positive == 100);
}

TEST_CASE("exhaustive_l0: identity instance") {
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
    const Eigen::Vector3d y(1.0, -2.0, 0.5);
    CHECK(exhaustive_l0(eye, y, 1) == Eigen::Vector3d(0.0, -2.0, 0.0));
}

TEST_CASE("exhaustive_l0: s = n reduces to ordinary least squares") {
    Rng rng(36);
    const SensingEnsemble ens = sample_matrix(12, 4, 0.0, rng);
    Eigen::VectorXd y(12);
    for (int i = 0; i < 12; ++i) y[i] = (rng() & 1) ? 1.0 : -1.0;
    const Eigen::VectorXd full = restricted_least_squares(ens.matrix, y, {0, 1, 2, 3});
    const Eigen::VectorXd x = exhaustive_l0(ens.matrix, y, 4);
    CHECK((x - full).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("exhaustive_l0: objective never beats the zero vector backwards") {
    Rng rng(37);
    const SensingEnsemble ens = sample_matrix(30, 8, 0.2, rng);
    Eigen::VectorXd y(30);
    for (int i = 0; i < 30; ++i) y[i] = (rng() & 1) ? 1.0 : -1.0;
    const Eigen::VectorXd x = exhaustive_l0(ens.matrix, y, 2);
    const double obj = 0.5 * (y - ens.matrix * x).squaredNorm() / 30.0;
    CHECK(obj <= 0.5 * y.squaredNorm() / 30.0);
}

TEST_CASE("exhaustive_l0: combinatorial guard refuses with a size estimate") {
    Rng rng(38);
    const SensingEnsemble ens = sample_matrix(10, 50, 0.0, rng);
    CHECK(binomial_estimate(50, 10) > 1e6);
    try {
        exhaustive_l0(ens.matrix, Eigen::VectorXd::Ones(10), 10);
        FAIL("expected the combinatorial guard to refuse");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("guard") != std::string::npos);
    }
}

TEST_CASE("exhaustive objective lower-bounds the GNA objective") {
    for (int t = 0; t < 20; ++t) {
        Rng rng = make_stream(7300, 0, std::uint64_t(t));
        const int n = 8, s = 2, m = 40;
        const SparseSignal sig = make_signal(n, s, rng);
        const SensingEnsemble ens = sample_matrix(m, n, 0.1, rng);
        const BinaryObservation obs = observe(ens, sig, 0.1, 0.05, rng);
        SolverOptions opts;
        opts.s = s;
        const Eigen::VectorXd by_gna = run_gna(ens.matrix, obs.y, opts).x_hat;
        const Eigen::VectorXd by_oracle = exhaustive_l0(ens.matrix, obs.y, s);
        const auto obj = [&](const Eigen::VectorXd& x) {
            return 0.5 * (obs.y - ens.matrix * x).squaredNorm() / double(m);
        };
        CHECK(obj(by_oracle) <= obj(by_gna) + 1e-12);
    }
}
