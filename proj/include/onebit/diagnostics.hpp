#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "onebit/rng.hpp"

namespace onebit {

// Extremal eigenvalues of Psi_A^t Psi_A / m over supports of size 2s;
// exact extrema when `exhaustive`, sampled envelopes otherwise.
struct RestrictedSpectrum {
    double c2s_min = 0.0;
    double c2s_max = 0.0;
    int support_size = 0; // 2s
    bool exhaustive = false;
};

// Sampled envelopes of the cone constants
//   C_* = inf, C^* = sup over 2s-sparse v of v^t Psi^t Psi v / (m ||v||_1 ||v||_inf).
// A minimum over samples can only overestimate an inf (and the max
// underestimate a sup); these are estimates, never certified bounds.
struct ConeConstants {
    double c_star_lower = 0.0;
    double c_star_upper = 0.0;
    int samples = 0;
};

// Log-log least-squares fit of error against m.
struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<std::pair<double, double>> points; // (m, error)
};

RestrictedSpectrum restricted_spectrum(const Eigen::MatrixXd& psi, int s, std::int64_t budget,
                                       Rng& rng);

ConeConstants cone_constants(const Eigen::MatrixXd& psi, int s, int samples, Rng& rng);

// Ratio evaluated by cone_constants for one direction (exposed for tests).
double cone_ratio(const Eigen::MatrixXd& psi, const Eigen::VectorXd& v);

ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& points);

// Theoretical step-size ceilings (4/(9 gamma), 4/(9 gamma sqrt(s))); advisory only.
std::pair<double, double> eta_bound(double gamma_max_estimate, int s);

} // namespace onebit
