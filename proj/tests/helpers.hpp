#pragma once

#include <vector>

#include <Eigen/Core>

#include "onebit/model.hpp"
#include "onebit/rng.hpp"

namespace onebit::testing {

// Gaussian-valued signal redrawn until every normalized magnitude clears
// min_mag (detectability floor used by the recovery studies).
inline SparseSignal make_separated_signal(int n, int s, Rng& rng, double min_mag) {
    for (;;) {
        SparseSignal sig = make_signal(n, s, rng);
        if (sig.values.cwiseAbs().minCoeff() >= min_mag) return sig;
    }
}

inline std::vector<int> nonzero_indices(const Eigen::VectorXd& x) {
    std::vector<int> idx;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x[i] != 0.0) idx.push_back(static_cast<int>(i));
    return idx;
}

} // namespace onebit::testing
