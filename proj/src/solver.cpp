#include "onebit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace onebit {

void SolverOptions::validate() const {
    if (s < 1) throw std::invalid_argument("SolverOptions: s must be >= 1");
    if (!(eta > 0.0)) throw std::invalid_argument("SolverOptions: eta must be > 0");
    if (max_iter < 1) throw std::invalid_argument("SolverOptions: max_iter must be >= 1");
    if (!(ls_ridge >= 0.0)) throw std::invalid_argument("SolverOptions: ls_ridge must be >= 0");
}

namespace {

std::string support_string(const std::vector<int>& support) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < support.size(); ++i) os << (i ? "," : "") << support[i];
    os << '}';
    return os.str();
}

// Indices of the s largest |z_i|; the order is total (magnitude desc, then
// index asc), which is the tie rule used everywhere.
std::vector<int> top_magnitude_indices(const Eigen::VectorXd& z, int s) {
    const int n = static_cast<int>(z.size());
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    const auto before = [&z](int a, int b) {
        const double za = std::abs(z[a]), zb = std::abs(z[b]);
        return za != zb ? za > zb : a < b;
    };
    std::nth_element(idx.begin(), idx.begin() + (s - 1), idx.end(), before);
    idx.resize(static_cast<std::size_t>(s));
    std::sort(idx.begin(), idx.end());
    return idx;
}

struct RestrictedSolve {
    Eigen::VectorXd coeffs;
    int factorizations = 0;
};

RestrictedSolve solve_restricted(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                                 const std::vector<int>& support, double ridge_floor) {
    const int k = static_cast<int>(support.size());
    Eigen::MatrixXd cols(psi.rows(), k);
    for (int j = 0; j < k; ++j) cols.col(j) = psi.col(support[static_cast<std::size_t>(j)]);

    Eigen::MatrixXd gram = cols.transpose() * cols;
    const Eigen::VectorXd rhs = cols.transpose() * y;

    RestrictedSolve out;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    ++out.factorizations;
    if (llt.info() == Eigen::Success) {
        out.coeffs = llt.solve(rhs);
        if (out.coeffs.allFinite()) return out;
    }

    const double ridge = ridge_floor > 0.0 ? ridge_floor : 1e-10 * gram.trace() / k;
    if (ridge > 0.0) {
        gram.diagonal().array() += ridge;
        Eigen::LLT<Eigen::MatrixXd> retry(gram);
        ++out.factorizations;
        if (retry.info() == Eigen::Success) {
            out.coeffs = retry.solve(rhs);
            if (out.coeffs.allFinite()) return out;
        }
    }
    throw SingularGramError("restricted Gram matrix singular on support " + support_string(support),
                            support);
}

} // namespace

Eigen::VectorXd hard_threshold(const Eigen::VectorXd& z, int s) {
    if (s < 1 || s > z.size()) throw std::invalid_argument("hard_threshold: need 1 <= s <= length");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(z.size());
    for (int i : top_magnitude_indices(z, s)) out[i] = z[i];
    return out;
}

std::vector<int> active_set(const Eigen::VectorXd& x, const Eigen::VectorXd& d, double eta, int s) {
    if (x.size() != d.size()) throw std::invalid_argument("active_set: x/d length mismatch");
    if (!(eta > 0.0)) throw std::invalid_argument("active_set: eta must be > 0");
    if (s < 1 || s > x.size()) throw std::invalid_argument("active_set: need 1 <= s <= length");
    return top_magnitude_indices(x + eta * d, s);
}

Eigen::VectorXd restricted_least_squares(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                                         const std::vector<int>& support, double ridge_floor) {
    if (support.empty()) throw std::invalid_argument("restricted_least_squares: empty support");
    for (int i : support)
        if (i < 0 || i >= psi.cols())
            throw std::invalid_argument("restricted_least_squares: support index out of range");
    return solve_restricted(psi, y, support, ridge_floor).coeffs;
}

SolverState gna_step(const SolverState& state, const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                     const SolverOptions& opts, int* factorizations) {
    opts.validate();
    const auto n = psi.cols();
    const auto m = psi.rows();
    if (state.x.size() != n || state.d.size() != n || y.size() != m)
        throw std::invalid_argument("gna_step: dimension mismatch");

    std::vector<int> act = active_set(state.x, state.d, opts.eta, opts.s);
    RestrictedSolve ls = solve_restricted(psi, y, act, opts.ls_ridge);
    if (factorizations) *factorizations += ls.factorizations;

    SolverState next;
    next.x = Eigen::VectorXd::Zero(n);
    for (std::size_t j = 0; j < act.size(); ++j) next.x[act[j]] = ls.coeffs[static_cast<int>(j)];
    next.d = psi.transpose() * (y - psi * next.x) / static_cast<double>(m);
    for (int i : act) next.d[i] = 0.0;
    next.active = std::move(act);
    next.k = state.k + 1;
    return next;
}

SolverReport run_gna(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y, const SolverOptions& opts,
                     const Eigen::VectorXd* x0) {
    opts.validate();
    const auto n = psi.cols();
    const auto m = psi.rows();
    if (y.size() != m) throw std::invalid_argument("run_gna: y length != rows of psi");
    if (opts.s > n) throw std::invalid_argument("run_gna: s exceeds column count");
    if (x0 && x0->size() != n) throw std::invalid_argument("run_gna: x0 length != columns of psi");

    SolverState state;
    state.x = x0 ? *x0 : Eigen::VectorXd::Zero(n);
    state.d = psi.transpose() * (y - psi * state.x) / static_cast<double>(m);

    SolverReport report;
    while (true) {
        // Peek at the next active set; a repeat means the update would be a
        // no-op (same set, same restricted solve), so stop without paying it.
        std::vector<int> act = active_set(state.x, state.d, opts.eta, opts.s);
        report.active_history.push_back(act);
        if (!state.active.empty() && act == state.active) {
            report.converged = true;
            break;
        }
        if (report.iterations == opts.max_iter) break;
        try {
            state = gna_step(state, psi, y, opts, &report.ls_solves);
        } catch (const SingularGramError& e) {
            throw SingularGramError(std::string(e.what()) + " at iteration " +
                                        std::to_string(report.iterations),
                                    e.support());
        }
        ++report.iterations;
    }
    report.x_hat = std::move(state.x);
    return report;
}

double kkt_residual(const Eigen::VectorXd& x, const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                    double eta, int s) {
    if (!(eta > 0.0)) throw std::invalid_argument("kkt_residual: eta must be > 0");
    const Eigen::VectorXd d = psi.transpose() * (y - psi * x) / static_cast<double>(psi.rows());
    return (x - hard_threshold(x + eta * d, s)).lpNorm<Eigen::Infinity>();
}

SolverState newton_step(const SolverState& state, const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                        const SolverOptions& opts) {
    opts.validate();
    const int n = static_cast<int>(psi.cols());
    const double m = static_cast<double>(psi.rows());
    if (n > 512) throw std::invalid_argument("newton_step: n > 512 (oracle-only path)");
    if (state.x.size() != n || state.d.size() != n || y.size() != psi.rows())
        throw std::invalid_argument("newton_step: dimension mismatch");

    const std::vector<int> act = active_set(state.x, state.d, opts.eta, opts.s);
    std::vector<bool> in_active(static_cast<std::size_t>(n), false);
    for (int i : act) in_active[static_cast<std::size_t>(i)] = true;

    // Block system: rows [0,n) carry the thresholding identities (-d on the
    // active set, x on the inactive set), rows [n,2n) carry the dual residual
    // Psi^t Psi x + m d - Psi^t y.
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    Eigen::VectorXd f(2 * n);
    for (int i = 0; i < n; ++i) {
        if (in_active[static_cast<std::size_t>(i)]) {
            h(i, n + i) = -1.0;
            f[i] = -state.d[i];
        } else {
            h(i, i) = 1.0;
            f[i] = state.x[i];
        }
    }
    h.block(n, 0, n, n) = psi.transpose() * psi;
    h.block(n, n, n, n) = m * Eigen::MatrixXd::Identity(n, n);
    f.tail(n) = psi.transpose() * (psi * state.x) + m * state.d - psi.transpose() * y;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(h);
    if (!lu.isInvertible())
        throw SingularGramError("newton system singular on support " + support_string(act), act);
    const Eigen::VectorXd w_next =
        (Eigen::VectorXd(2 * n) << state.x, state.d).finished() - lu.solve(f);

    SolverState next;
    next.x = w_next.head(n);
    next.d = w_next.tail(n);
    next.active = act;
    next.k = state.k + 1;
    return next;
}

} // namespace onebit
