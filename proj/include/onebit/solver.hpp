#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace onebit {

// Restricted Gram matrix was singular even after the ridge fallback.
class SingularGramError : public std::runtime_error {
  public:
    SingularGramError(std::string message, std::vector<int> support)
        : std::runtime_error(std::move(message)), support_(std::move(support)) {}

    const std::vector<int>& support() const { return support_; }

  private:
    std::vector<int> support_;
};

struct SolverOptions {
    int s = 1;             // target sparsity
    double eta = 0.9;      // active-set step size
    int max_iter = 5;      // cap on executed primal/dual updates
    double ls_ridge = 0.0; // 0 -> automatic fallback 1e-10 * trace(G)/|A| on singularity

    void validate() const;
};

// Primal/dual pair at iteration k. `active` is the set A that produced (x, d);
// it is empty for an initial state, and has exactly s entries after a step.
struct SolverState {
    Eigen::VectorXd x;
    Eigen::VectorXd d;
    std::vector<int> active;
    int k = 0;
};

struct SolverReport {
    Eigen::VectorXd x_hat;
    int iterations = 0;   // executed primal/dual updates
    bool converged = false;
    std::vector<std::vector<int>> active_history; // every computed active set
    int ls_solves = 0;    // restricted least-squares factorizations
};

// Keeps the s largest-magnitude entries of z (ties toward the smaller index),
// zeroing the rest. Idempotent.
Eigen::VectorXd hard_threshold(const Eigen::VectorXd& z, int s);

// Indices of the s largest |x_i + eta d_i|, ascending; same tie rule as
// hard_threshold, so it equals supp(hard_threshold(x + eta d, s)).
std::vector<int> active_set(const Eigen::VectorXd& x, const Eigen::VectorXd& d, double eta, int s);

// argmin_u || y - Psi_A u ||_2 via the normal equations (Cholesky on the
// restricted Gram). A ridge floor is added only when the factorization fails.
Eigen::VectorXd restricted_least_squares(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                                         const std::vector<int>& support, double ridge_floor = 0.0);

// One update: select A^k from (x^k, d^k), solve restricted least squares on
// A^k, zero x off A^k and d on A^k, refresh d on the inactive set.
// `factorizations`, when given, is incremented per Gram factorization.
SolverState gna_step(const SolverState& state, const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                     const SolverOptions& opts, int* factorizations = nullptr);

// Iterates gna_step from x0 (zero when omitted) with d0 = Psi^t(y - Psi x0)/m
// until the active set repeats or max_iter updates have run.
SolverReport run_gna(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y, const SolverOptions& opts,
                     const Eigen::VectorXd* x0 = nullptr);

// || x - H_s(x + eta Psi^t(y - Psi x)/m) ||_inf; zero exactly at a KKT point
// of the cardinality-constrained least squares under this tie rule.
double kkt_residual(const Eigen::VectorXd& x, const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                    double eta, int s);

// Newton-system oracle: assembles the dense 2n x 2n block system for the KKT
// map and takes one exact Newton step. Must match gna_step to fp accuracy;
// guarded to n <= 512 since it exists as a cross-check, not a fast path.
SolverState newton_step(const SolverState& state, const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                        const SolverOptions& opts);

} // namespace onebit
