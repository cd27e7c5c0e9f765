#include "onebit/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

#include "onebit/solver.hpp"

namespace onebit {

void BihtOptions::validate() const {
    if (s < 1) throw std::invalid_argument("BihtOptions: s must be >= 1");
    if (step < 0.0) throw std::invalid_argument("BihtOptions: step must be >= 0");
    if (max_iter < 0) throw std::invalid_argument("BihtOptions: max_iter must be >= 0");
}

BihtResult biht(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y, const BihtOptions& opts) {
    opts.validate();
    const auto m = psi.rows();
    const auto n = psi.cols();
    if (y.size() != m) throw std::invalid_argument("biht: y length != rows of psi");
    if (opts.s > n) throw std::invalid_argument("biht: s exceeds column count");
    const double tau = opts.step > 0.0 ? opts.step : 1.0 / static_cast<double>(m);

    BihtResult out;
    out.x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sgn(m);
    for (int it = 0; it < opts.max_iter; ++it) {
        const Eigen::VectorXd px = psi * out.x;
        for (Eigen::Index i = 0; i < m; ++i) sgn[i] = px[i] >= 0.0 ? 1.0 : -1.0;
        Eigen::VectorXd next = hard_threshold(out.x + tau * (psi.transpose() * (y - sgn)) / 2.0, opts.s);
        ++out.iterations;
        if (next == out.x) {
            out.converged = true;
            break;
        }
        out.x = std::move(next);
    }
    if (opts.normalize_output) {
        const double nrm = out.x.norm();
        if (nrm > 0.0) out.x /= nrm;
    }
    return out;
}

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("project_l1_ball: radius must be > 0");
    if (v.lpNorm<1>() <= radius) return v;

    std::vector<double> mags(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(v[i]);
    std::sort(mags.begin(), mags.end(), std::greater<>());

    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < mags.size(); ++j) {
        cumulative += mags[j];
        const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
        if (mags[j] - candidate > 0.0) theta = candidate;
    }

    Eigen::VectorXd w(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double shrunk = std::abs(v[i]) - theta;
        w[i] = shrunk > 0.0 ? (v[i] > 0.0 ? shrunk : -shrunk) : 0.0;
    }
    return w;
}

Eigen::VectorXd lp_estimate(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y, int s) {
    if (s < 1 || s > psi.cols()) throw std::invalid_argument("lp_estimate: need 1 <= s <= n");
    if (y.size() != psi.rows()) throw std::invalid_argument("lp_estimate: y length != rows of psi");
    Eigen::VectorXd w =
        project_l1_ball(psi.transpose() * y / static_cast<double>(psi.rows()), std::sqrt(s));
    const double nrm = w.norm();
    if (nrm > 1.0) w /= nrm;
    return w;
}

double binomial_estimate(int n, int s) {
    if (s < 0 || s > n) return 0.0;
    double c = 1.0;
    for (int j = 1; j <= s; ++j) {
        c *= static_cast<double>(n - s + j) / static_cast<double>(j);
        if (c > 1e18) return 1e18; // saturate; only the guard comparison matters
    }
    return c;
}

Eigen::VectorXd exhaustive_l0(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y, int s) {
    const int n = static_cast<int>(psi.cols());
    const double m = static_cast<double>(psi.rows());
    if (s < 1 || s > n) throw std::invalid_argument("exhaustive_l0: need 1 <= s <= n");
    if (y.size() != psi.rows()) throw std::invalid_argument("exhaustive_l0: y length != rows of psi");
    const double count = binomial_estimate(n, s);
    if (count > 1e6)
        throw std::invalid_argument("exhaustive_l0: C(" + std::to_string(n) + "," + std::to_string(s) +
                                    ") ~ " + std::to_string(count) + " supports exceeds the 1e6 guard");

    std::vector<int> support(static_cast<std::size_t>(s));
    std::iota(support.begin(), support.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x;

    Eigen::MatrixXd cols(psi.rows(), s);
    while (true) {
        for (int j = 0; j < s; ++j) cols.col(j) = psi.col(support[static_cast<std::size_t>(j)]);
        Eigen::LLT<Eigen::MatrixXd> llt(cols.transpose() * cols);
        if (llt.info() == Eigen::Success) {
            const Eigen::VectorXd u = llt.solve(cols.transpose() * y);
            if (u.allFinite()) {
                const double obj = 0.5 * (y - cols * u).squaredNorm() / m;
                // Lexicographic enumeration order: a strict margin keeps the
                // first support of any near-tied group.
                if (obj < best - 1e-12) {
                    best = obj;
                    best_x = Eigen::VectorXd::Zero(n);
                    for (int j = 0; j < s; ++j) best_x[support[static_cast<std::size_t>(j)]] = u[j];
                }
            }
        }
        // next combination in lexicographic order
        int j = s - 1;
        while (j >= 0 && support[static_cast<std::size_t>(j)] == n - s + j) --j;
        if (j < 0) break;
        ++support[static_cast<std::size_t>(j)];
        for (int t = j + 1; t < s; ++t)
            support[static_cast<std::size_t>(t)] = support[static_cast<std::size_t>(t - 1)] + 1;
    }
    if (!best_x.size())
        throw std::runtime_error("exhaustive_l0: every restricted Gram matrix was singular");
    return best_x;
}

} // namespace onebit
