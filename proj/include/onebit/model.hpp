#pragma once

#include "onebit/rng.hpp"
#include "onebit/types.hpp"

namespace onebit {

enum class SignalValues {
    gaussian, // i.i.d. standard normal values, then l2-normalized
    flat      // random signs, equal magnitudes 1/sqrt(s)
};

// Uniform random support of size s; values per `kind`; unit l2 norm.
SparseSignal make_signal(int n, int s, Rng& rng, SignalValues kind = SignalValues::gaussian);

// Rows are independent stationary Gaussian AR(1) sequences realizing
// Sigma_jk = nu^|j-k| exactly in distribution, at O(mn) cost.
SensingEnsemble sample_matrix(int m, int n, double nu, Rng& rng);

// y = eta .* sign(Psi x* + eps), sign(0) = +1. flip_mask_i is true with
// probability flip_prob; a flipped measurement records the negated sign.
BinaryObservation observe(const SensingEnsemble& ensemble, const SparseSignal& signal,
                          double sigma, double flip_prob, Rng& rng);

// The identifiable scale c = (1 - 2 q) sqrt(2 / (pi (sigma^2 + 1))) multiplying
// x* in the population least-squares minimizer (q = flip_prob).
double effective_scale(double sigma, double flip_prob);

// Orthonormal 1D Haar wavelet transform of a given level. synthesize() maps
// coefficients [approx_L | detail_L | ... | detail_1] to samples; analyze()
// inverts it exactly.
class HaarTransform {
  public:
    HaarTransform(int level, int length); // throws unless 2^level divides length

    int level() const { return level_; }
    int length() const { return length_; }

    Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs) const;
    Eigen::VectorXd analyze(const Eigen::VectorXd& samples) const;

  private:
    int level_;
    int length_;
};

// Effective sensing matrix of the wavelet experiment: gaussian * W_synth,
// computed row-wise through the fast transform (row i becomes analyze(row i)).
Eigen::MatrixXd wavelet_sensing_matrix(const Eigen::MatrixXd& gaussian, const HaarTransform& haar);

} // namespace onebit
