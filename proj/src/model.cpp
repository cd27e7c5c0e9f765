#include "onebit/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace onebit {

void ProblemConfig::validate() const {
    if (m < 1) throw std::invalid_argument("ProblemConfig: m must be >= 1");
    if (n < 1) throw std::invalid_argument("ProblemConfig: n must be >= 1");
    if (s < 1 || s > n) throw std::invalid_argument("ProblemConfig: need 1 <= s <= n");
    if (!(nu >= 0.0 && nu < 1.0)) throw std::invalid_argument("ProblemConfig: need 0 <= nu < 1");
    if (!(sigma >= 0.0)) throw std::invalid_argument("ProblemConfig: need sigma >= 0");
    if (!(flip_prob >= 0.0 && flip_prob <= 1.0))
        throw std::invalid_argument("ProblemConfig: need 0 <= flip_prob <= 1");
}

Eigen::VectorXd SparseSignal::dense() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < support.size(); ++i) x[support[i]] = values[static_cast<int>(i)];
    return x;
}

SparseSignal make_signal(int n, int s, Rng& rng, SignalValues kind) {
    if (s < 1 || s > n) throw std::invalid_argument("make_signal: need 1 <= s <= n");

    // Partial Fisher-Yates: uniform support without replacement.
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < s; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
    }
    std::vector<int> support(pool.begin(), pool.begin() + s);
    std::sort(support.begin(), support.end());

    Eigen::VectorXd values(s);
    if (kind == SignalValues::flat) {
        const double mag = 1.0 / std::sqrt(static_cast<double>(s));
        std::bernoulli_distribution coin(0.5);
        for (int i = 0; i < s; ++i) values[i] = coin(rng) ? mag : -mag;
    } else {
        std::normal_distribution<double> gauss;
        do {
            for (int i = 0; i < s; ++i) values[i] = gauss(rng);
        } while (values.norm() == 0.0); // probability-zero redraw
        values /= values.norm();
    }

    return SparseSignal{n, std::move(support), std::move(values)};
}

SensingEnsemble sample_matrix(int m, int n, double nu, Rng& rng) {
    if (m < 1 || n < 1) throw std::invalid_argument("sample_matrix: need m, n >= 1");
    if (!(nu >= 0.0 && nu < 1.0)) throw std::invalid_argument("sample_matrix: need 0 <= nu < 1");

    std::normal_distribution<double> gauss;
    Eigen::MatrixXd psi(m, n);
    for (int i = 0; i < m; ++i) psi(i, 0) = gauss(rng);
    if (nu == 0.0) {
        for (int k = 1; k < n; ++k)
            for (int i = 0; i < m; ++i) psi(i, k) = gauss(rng);
    } else {
        const double innov = std::sqrt(1.0 - nu * nu);
        for (int k = 1; k < n; ++k)
            for (int i = 0; i < m; ++i) psi(i, k) = nu * psi(i, k - 1) + innov * gauss(rng);
    }
    return SensingEnsemble{std::move(psi), nu};
}

BinaryObservation observe(const SensingEnsemble& ensemble, const SparseSignal& signal,
                          double sigma, double flip_prob, Rng& rng) {
    if (ensemble.matrix.cols() != signal.n)
        throw std::invalid_argument("observe: ensemble/signal dimension mismatch");
    if (!(sigma >= 0.0)) throw std::invalid_argument("observe: need sigma >= 0");
    if (!(flip_prob >= 0.0 && flip_prob <= 1.0))
        throw std::invalid_argument("observe: need 0 <= flip_prob <= 1");

    const auto m = ensemble.matrix.rows();
    Eigen::VectorXd pre = ensemble.matrix * signal.dense();
    if (sigma > 0.0) {
        std::normal_distribution<double> gauss(0.0, sigma);
        for (Eigen::Index i = 0; i < m; ++i) pre[i] += gauss(rng);
    }

    std::bernoulli_distribution flip(flip_prob);
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(m), 0);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sgn = pre[i] >= 0.0 ? 1.0 : -1.0; // sign(0) = +1
        mask[static_cast<std::size_t>(i)] = flip(rng) ? 1 : 0;
        y[i] = mask[static_cast<std::size_t>(i)] ? -sgn : sgn;
    }
    return BinaryObservation{std::move(y), std::move(mask), std::move(pre)};
}

double effective_scale(double sigma, double flip_prob) {
    return (1.0 - 2.0 * flip_prob) * std::sqrt(2.0 / (std::numbers::pi * (sigma * sigma + 1.0)));
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

} // namespace

HaarTransform::HaarTransform(int level, int length) : level_(level), length_(length) {
    if (level < 0) throw std::invalid_argument("HaarTransform: level must be >= 0");
    if (length < 1) throw std::invalid_argument("HaarTransform: length must be >= 1");
    if (level > 30 || length % (1 << level) != 0)
        throw std::invalid_argument("HaarTransform: length must be divisible by 2^level");
}

Eigen::VectorXd HaarTransform::analyze(const Eigen::VectorXd& samples) const {
    if (samples.size() != length_) throw std::invalid_argument("HaarTransform::analyze: bad length");
    Eigen::VectorXd coeffs = samples;
    Eigen::VectorXd buf(length_);
    int cur = length_;
    for (int lv = 0; lv < level_; ++lv) {
        const int half = cur / 2;
        for (int i = 0; i < half; ++i) {
            buf[i] = (coeffs[2 * i] + coeffs[2 * i + 1]) * kInvSqrt2;        // approx
            buf[half + i] = (coeffs[2 * i] - coeffs[2 * i + 1]) * kInvSqrt2; // detail
        }
        coeffs.head(cur) = buf.head(cur);
        cur = half;
    }
    return coeffs;
}

Eigen::VectorXd HaarTransform::synthesize(const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() != length_) throw std::invalid_argument("HaarTransform::synthesize: bad length");
    Eigen::VectorXd samples = coeffs;
    Eigen::VectorXd buf(length_);
    int cur = length_ >> level_;
    for (int lv = 0; lv < level_; ++lv) {
        const int half = cur;
        cur *= 2;
        for (int i = 0; i < half; ++i) {
            buf[2 * i] = (samples[i] + samples[half + i]) * kInvSqrt2;
            buf[2 * i + 1] = (samples[i] - samples[half + i]) * kInvSqrt2;
        }
        samples.head(cur) = buf.head(cur);
    }
    return samples;
}

Eigen::MatrixXd wavelet_sensing_matrix(const Eigen::MatrixXd& gaussian, const HaarTransform& haar) {
    if (gaussian.cols() != haar.length())
        throw std::invalid_argument("wavelet_sensing_matrix: column count != transform length");
    Eigen::MatrixXd out(gaussian.rows(), gaussian.cols());
    for (Eigen::Index i = 0; i < gaussian.rows(); ++i)
        out.row(i) = haar.analyze(gaussian.row(i).transpose()).transpose();
    return out;
}

} // namespace onebit
