#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace onebit {

// Data-generation parameters (m, n, s, nu, sigma, flip_prob) plus the RNG seed.
struct ProblemConfig {
    int m = 0;                 // measurement count
    int n = 0;                 // ambient dimension
    int s = 0;                 // sparsity level, 1 <= s <= n
    double nu = 0.0;           // AR(1) row correlation, in [0, 1)
    double sigma = 0.0;        // pre-quantization noise level, >= 0
    double flip_prob = 0.0;    // P[sign of a measurement is flipped], in [0, 1]
    std::uint64_t seed = 0;

    void validate() const; // throws std::invalid_argument on any violated bound
};

// Ground-truth signal: unit l2 norm, exactly |support| nonzeros.
struct SparseSignal {
    int n = 0;
    std::vector<int> support;  // strictly increasing indices in [0, n)
    Eigen::VectorXd values;    // nonzero values, aligned with support

    Eigen::VectorXd dense() const;
};

// m x n sensing matrix with i.i.d. N(0, Sigma) rows, Sigma_jk = nu^|j-k|.
struct SensingEnsemble {
    Eigen::MatrixXd matrix;
    double covariance_nu = 0.0;
};

// 1-bit measurements. pre_quant and flip_mask are kept for tests and audit;
// decoders only ever see (y, Psi, s).
struct BinaryObservation {
    Eigen::VectorXd y;                    // entries in {-1, +1}
    std::vector<std::uint8_t> flip_mask;  // 1 where the sign was flipped
    Eigen::VectorXd pre_quant;            // Psi x* + eps
};

} // namespace onebit
