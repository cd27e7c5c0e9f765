#include "onebit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "onebit/baselines.hpp"

namespace onebit {

namespace {

// Eigenvalue range of the Gram block for one support, divided by m.
std::pair<double, double> gram_eigen_range(const Eigen::MatrixXd& psi, const std::vector<int>& support) {
    const int k = static_cast<int>(support.size());
    Eigen::MatrixXd cols(psi.rows(), k);
    for (int j = 0; j < k; ++j) cols.col(j) = psi.col(support[static_cast<std::size_t>(j)]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cols.transpose() * cols / static_cast<double>(psi.rows()),
                                                      Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

std::vector<int> random_support(int n, int k, Rng& rng) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace

RestrictedSpectrum restricted_spectrum(const Eigen::MatrixXd& psi, int s, std::int64_t budget,
                                       Rng& rng) {
    const int n = static_cast<int>(psi.cols());
    if (s < 1) throw std::invalid_argument("restricted_spectrum: s must be >= 1");
    if (2 * s > n) throw std::invalid_argument("restricted_spectrum: 2s exceeds column count");
    if (budget < 1) throw std::invalid_argument("restricted_spectrum: budget must be >= 1");

    const int k = 2 * s;
    RestrictedSpectrum out;
    out.support_size = k;
    out.c2s_min = std::numeric_limits<double>::infinity();
    out.c2s_max = -std::numeric_limits<double>::infinity();

    const double total = binomial_estimate(n, k);
    out.exhaustive = total <= static_cast<double>(budget);
    if (out.exhaustive) {
        std::vector<int> support(static_cast<std::size_t>(k));
        std::iota(support.begin(), support.end(), 0);
        while (true) {
            const auto [lo, hi] = gram_eigen_range(psi, support);
            out.c2s_min = std::min(out.c2s_min, lo);
            out.c2s_max = std::max(out.c2s_max, hi);
            int j = k - 1;
            while (j >= 0 && support[static_cast<std::size_t>(j)] == n - k + j) --j;
            if (j < 0) break;
            ++support[static_cast<std::size_t>(j)];
            for (int t = j + 1; t < k; ++t)
                support[static_cast<std::size_t>(t)] = support[static_cast<std::size_t>(t - 1)] + 1;
        }
    } else {
        for (std::int64_t draw = 0; draw < budget; ++draw) {
            const auto [lo, hi] = gram_eigen_range(psi, random_support(n, k, rng));
            out.c2s_min = std::min(out.c2s_min, lo);
            out.c2s_max = std::max(out.c2s_max, hi);
        }
    }
    return out;
}

double cone_ratio(const Eigen::MatrixXd& psi, const Eigen::VectorXd& v) {
    const double denom = static_cast<double>(psi.rows()) * v.lpNorm<1>() * v.lpNorm<Eigen::Infinity>();
    if (denom == 0.0) throw std::invalid_argument("cone_ratio: zero direction");
    return (psi * v).squaredNorm() / denom;
}

ConeConstants cone_constants(const Eigen::MatrixXd& psi, int s, int samples, Rng& rng) {
    const int n = static_cast<int>(psi.cols());
    if (samples < 1) throw std::invalid_argument("cone_constants: samples must be >= 1");
    if (s < 1) throw std::invalid_argument("cone_constants: s must be >= 1");
    const int k = std::min(2 * s, n);

    ConeConstants out;
    out.samples = samples;
    out.c_star_lower = std::numeric_limits<double>::infinity();
    out.c_star_upper = -std::numeric_limits<double>::infinity();
    std::normal_distribution<double> gauss;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (int t = 0; t < samples; ++t) {
        v.setZero();
        for (int i : random_support(n, k, rng)) v[i] = gauss(rng);
        if (v.lpNorm<1>() == 0.0) { --t; continue; }
        const double r = cone_ratio(psi, v);
        out.c_star_lower = std::min(out.c_star_lower, r);
        out.c_star_upper = std::max(out.c_star_upper, r);
    }
    return out;
}

ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 4) throw std::invalid_argument("scaling_fit: need at least 4 points");
    for (const auto& [m, err] : points)
        if (!(m > 0.0) || !(err > 0.0))
            throw std::invalid_argument("scaling_fit: all coordinates must be positive");

    const double n = static_cast<double>(points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [m, err] : points) {
        const double x = std::log(m), y = std::log(err);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("scaling_fit: degenerate abscissae");

    ScalingFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.points = points;

    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (const auto& [m, err] : points) {
        const double y = std::log(err);
        const double pred = fit.intercept + fit.slope * std::log(m);
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    fit.r2 = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    return fit;
}

std::pair<double, double> eta_bound(double gamma_max_estimate, int s) {
    if (!(gamma_max_estimate > 0.0)) throw std::invalid_argument("eta_bound: gamma must be > 0");
    if (s < 1) throw std::invalid_argument("eta_bound: s must be >= 1");
    const double base = 4.0 / (9.0 * gamma_max_estimate);
    return {base, base / std::sqrt(static_cast<double>(s))};
}

} // namespace onebit
