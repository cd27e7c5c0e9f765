#pragma once

#include <vector>

#include <Eigen/Core>

namespace onebit {

struct BihtOptions {
    int s = 1;
    double step = 0.0;            // gradient step tau; 0 -> 1/m
    int max_iter = 100;
    bool normalize_output = true; // project the final iterate to the unit sphere

    void validate() const;
};

struct BihtResult {
    Eigen::VectorXd x;
    int iterations = 0;
    bool converged = false; // the iterate repeated before max_iter
};

// Binary iterative hard thresholding: projected subgradient iteration
// x <- H_s(x + tau Psi^t (y - sign(Psi x)) / 2) from x = 0.
BihtResult biht(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y, const BihtOptions& opts);

// Euclidean projection onto { w : ||w||_1 <= radius } (exact, via the sorted
// simplex-projection threshold).
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius);

// Projected linear estimator: Psi^t y / m, projected onto the l1 ball of
// radius sqrt(s), then rescaled into the unit l2 ball if needed.
Eigen::VectorXd lp_estimate(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y, int s);

// Exhaustive l0 decoder: restricted least squares on every size-s support,
// global objective minimizer, ties (within 1e-12) to the lexicographically
// smallest support. Refuses when C(n, s) > 1e6.
Eigen::VectorXd exhaustive_l0(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y, int s);

// C(n, s) with saturation, for the exhaustive-search guard.
double binomial_estimate(int n, int s);

} // namespace onebit
