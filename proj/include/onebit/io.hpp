#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "onebit/bench.hpp"
#include "onebit/diagnostics.hpp"
#include "onebit/solver.hpp"
#include "onebit/types.hpp"

namespace onebit {

// Flat key-value config file (keys m, n, s, nu, sigma, flip_prob, seed;
// '#' starts a comment).
ProblemConfig read_problem_config(const std::filesystem::path& path);
void write_problem_config(const ProblemConfig& config, const std::filesystem::path& path);

// Generated data set as exchanged on disk: header (magic "OB1T", version,
// m, n, s), row-major matrix of little-endian doubles, y as int8, flip mask
// as uint8.
struct Dataset {
    Eigen::MatrixXd psi;
    Eigen::VectorXd y;
    std::vector<std::uint8_t> flip_mask;
    int s = 0;
};

void write_dataset(const std::filesystem::path& path, const Eigen::MatrixXd& psi,
                   const Eigen::VectorXd& y, const std::vector<std::uint8_t>& flip_mask, int s);
Dataset read_dataset(const std::filesystem::path& path);

// Experiment plan in the same flat key-value format; exactly one of
// m,n,s,nu,sigma,flip_prob may carry a sweep `start:step:stop` (inclusive).
// Other keys: reps, seed, methods (comma list), eta, max_iter,
// signal (flat|gauss), threads, out_prefix.
ExperimentPlan read_plan(const std::filesystem::path& path);

// Parses one sweep expression into its values (also used for CLI presets).
std::vector<double> parse_sweep(const std::string& text);

nlohmann::json solver_report_json(const SolverReport& report);
// Baseline estimates share the sparse-pair shape of SolverReport.
nlohmann::json sparse_estimate_json(const Eigen::VectorXd& x, int iterations);
nlohmann::json diagnostics_json(const RestrictedSpectrum& spectrum, const ConeConstants& cone,
                                const std::pair<double, double>& eta_bounds);

} // namespace onebit
