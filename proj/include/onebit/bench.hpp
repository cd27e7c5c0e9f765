#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "onebit/model.hpp"
#include "onebit/types.hpp"

namespace onebit {

enum class Method { gna, biht, lp, oracle };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

// Per-replication result for one decoder on one generated data set.
struct TrialRecord {
    ProblemConfig config;
    int config_index = 0;
    int replication = 0;
    Method method = Method::gna;
    double l2_err = 0.0;           // || xhat/||xhat|| - x*/||x*|| ||_2
    bool support_exact = false;    // supp(xhat) == supp(x*)
    int iterations = 0;
    double wall_time_s = 0.0;      // decode time only
    std::optional<double> linf_err_scaled; // || xhat/c - x* ||_inf, absent when |c| < 1e-6
    std::string error;             // nonempty when the decode threw
};

struct AggregateRow {
    ProblemConfig config;
    int config_index = 0;
    Method method = Method::gna;
    double mean_time_s = 0.0;
    double mean_l2_err = 0.0;
    double pre_percent = 0.0; // 100 * fraction of trials with exact support recovery
    double mean_iterations = 0.0;
    int trial_count = 0;
};

struct ExperimentPlan {
    std::vector<ProblemConfig> grid;
    std::string sweep_key;            // empty when nothing is swept
    std::vector<double> sweep_values; // swept value per grid entry (when sweep_key set)
    std::vector<Method> methods{Method::gna};
    int replications = 100;
    std::uint64_t base_seed = 1;
    double eta = 0.9;
    int max_iter = 5;
    SignalValues signal_values = SignalValues::flat;
    int threads = 0;                  // 0 -> hardware concurrency
    std::string out_prefix;           // optional stem for emitted files

    void validate() const;
    // Abscissa for plot data: the swept value, or the grid index.
    double plot_x(int config_index) const;
};

// Metric helpers shared by the harness and tests.
double l2_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);
bool support_match(const Eigen::VectorXd& estimate, const std::vector<int>& support);

// Decodes one data set with one method; used by the harness and the CLI.
struct DecodeResult {
    Eigen::VectorXd x;
    int iterations = 0;
};
DecodeResult decode_with(Method method, const Eigen::MatrixXd& psi, const Eigen::VectorXd& y, int s,
                         double eta, int max_iter);

// One (config, replication) cell: generates data from the derived stream and
// runs every plan method on it. Pure function of (plan, indices).
std::vector<TrialRecord> run_single_trial(const ExperimentPlan& plan, int config_index, int replication);

// Full battery over grid x replications, executed by a bounded worker pool.
// Record order and content depend only on the plan, never on scheduling.
std::vector<TrialRecord> run_trials(const ExperimentPlan& plan);

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records);

// 10 log10(V^2 / MSE) with V = max |reference|; +inf sentinel on exact match.
double psnr(const Eigen::VectorXd& reference, const Eigen::VectorXd& estimate);

// Wavelet-domain experiment: Gaussian measurements of a coefficient-sparse
// signal through the Haar synthesis operator.
struct WaveletOutcome {
    TrialRecord record;            // coefficient-domain metrics
    Eigen::VectorXd reconstruction; // sample-domain, from the normalized estimate
    double psnr_db = 0.0;
};
struct WaveletTrial {
    Eigen::VectorXd signal; // true sample-domain signal
    std::vector<WaveletOutcome> outcomes; // one per method, same data set
};
WaveletTrial wavelet_experiment(const ProblemConfig& config, const std::vector<Method>& methods,
                                int level, SignalValues kind, double eta, int max_iter, Rng& rng);

// Seeded battery of wavelet trials (streams derived as in run_trials).
std::vector<WaveletTrial> run_wavelet_trials(const ProblemConfig& config,
                                             const std::vector<Method>& methods, int level,
                                             SignalValues kind, double eta, int max_iter,
                                             int replications, std::uint64_t base_seed, int threads);

// Writes <stem>_aggregate.csv (fixed column order), <stem>_records.json and
// per-method plot-data files (x y stderr) for the recovery-probability and
// error curves. Returns the written paths.
struct EmitPaths {
    std::filesystem::path csv;
    std::filesystem::path records_json;
    std::vector<std::filesystem::path> plot_data;
};
EmitPaths emit(const std::vector<AggregateRow>& rows, const std::vector<TrialRecord>& records,
               const ExperimentPlan& plan, const std::filesystem::path& out_dir,
               const std::string& stem);

// Parses a CSV written by emit (round-trip inverse).
std::vector<AggregateRow> read_aggregate_csv(const std::filesystem::path& path);

} // namespace onebit
