#include "onebit/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "onebit/baselines.hpp"
#include "onebit/solver.hpp"

namespace onebit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Bounded worker pool over [0, total); items are independent and write only
// to their own slots, so scheduling never affects results.
template <typename Fn>
void parallel_for_index(std::size_t total, int threads, Fn&& fn) {
    threads = std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(threads)), total);
    if (threads <= 1) {
        for (std::size_t i = 0; i < total; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= total) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

std::string to_string(Method method) {
    switch (method) {
        case Method::gna: return "gna";
        case Method::biht: return "biht";
        case Method::lp: return "lp";
        case Method::oracle: return "oracle";
    }
    throw std::invalid_argument("to_string: unknown method");
}

Method method_from_string(const std::string& name) {
    if (name == "gna") return Method::gna;
    if (name == "biht") return Method::biht;
    if (name == "lp") return Method::lp;
    if (name == "oracle") return Method::oracle;
    throw std::invalid_argument("unknown method '" + name + "' (expected gna|biht|lp|oracle)");
}

void ExperimentPlan::validate() const {
    if (grid.empty()) throw std::invalid_argument("ExperimentPlan: empty grid");
    for (const auto& cfg : grid) cfg.validate();
    if (!sweep_key.empty() && sweep_values.size() != grid.size())
        throw std::invalid_argument("ExperimentPlan: sweep_values/grid size mismatch");
    if (methods.empty()) throw std::invalid_argument("ExperimentPlan: no methods");
    if (replications < 1) throw std::invalid_argument("ExperimentPlan: replications must be >= 1");
    if (!(eta > 0.0)) throw std::invalid_argument("ExperimentPlan: eta must be > 0");
    if (max_iter < 1) throw std::invalid_argument("ExperimentPlan: max_iter must be >= 1");
    for (Method m : methods)
        if (m == Method::oracle)
            for (const auto& cfg : grid)
                if (binomial_estimate(cfg.n, cfg.s) > 1e6)
                    throw std::invalid_argument(
                        "ExperimentPlan: oracle requested but C(n,s) exceeds the exhaustive guard");
}

double ExperimentPlan::plot_x(int config_index) const {
    if (!sweep_key.empty()) return sweep_values[static_cast<std::size_t>(config_index)];
    return static_cast<double>(config_index);
}

double l2_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
    const double nt = truth.norm();
    if (nt == 0.0) throw std::invalid_argument("l2_error: zero truth vector");
    const double ne = estimate.norm();
    if (ne == 0.0) return 1.0; // normalized zero estimate stays at the origin
    return (estimate / ne - truth / nt).norm();
}

bool support_match(const Eigen::VectorXd& estimate, const std::vector<int>& support) {
    std::size_t hits = 0;
    for (Eigen::Index i = 0; i < estimate.size(); ++i) {
        if (estimate[i] != 0.0) {
            if (!std::binary_search(support.begin(), support.end(), static_cast<int>(i))) return false;
            ++hits;
        }
    }
    return hits == support.size();
}

DecodeResult decode_with(Method method, const Eigen::MatrixXd& psi, const Eigen::VectorXd& y, int s,
                         double eta, int max_iter) {
    switch (method) {
        case Method::gna: {
            SolverOptions opts;
            opts.s = s;
            opts.eta = eta;
            opts.max_iter = max_iter;
            SolverReport rep = run_gna(psi, y, opts);
            return {std::move(rep.x_hat), rep.iterations};
        }
        case Method::biht: {
            BihtOptions opts;
            opts.s = s;
            BihtResult res = biht(psi, y, opts);
            return {std::move(res.x), res.iterations};
        }
        case Method::lp:
            return {lp_estimate(psi, y, s), 0};
        case Method::oracle:
            return {exhaustive_l0(psi, y, s), 0};
    }
    throw std::invalid_argument("decode_with: unknown method");
}

std::vector<TrialRecord> run_single_trial(const ExperimentPlan& plan, int config_index, int replication) {
    ProblemConfig config = plan.grid[static_cast<std::size_t>(config_index)];
    config.seed = plan.base_seed;

    Rng rng = make_stream(plan.base_seed, static_cast<std::uint64_t>(config_index),
                          static_cast<std::uint64_t>(replication));
    const SparseSignal signal = make_signal(config.n, config.s, rng, plan.signal_values);
    const SensingEnsemble ensemble = sample_matrix(config.m, config.n, config.nu, rng);
    const BinaryObservation obs = observe(ensemble, signal, config.sigma, config.flip_prob, rng);

    const Eigen::VectorXd truth = signal.dense();
    const double c = effective_scale(config.sigma, config.flip_prob);

    std::vector<TrialRecord> records;
    records.reserve(plan.methods.size());
    for (Method method : plan.methods) {
        TrialRecord rec;
        rec.config = config;
        rec.config_index = config_index;
        rec.replication = replication;
        rec.method = method;
        const auto t0 = Clock::now();
        try {
            DecodeResult dec = decode_with(method, ensemble.matrix, obs.y, config.s, plan.eta,
                                           plan.max_iter);
            rec.wall_time_s = seconds_since(t0);
            rec.iterations = dec.iterations;
            rec.l2_err = l2_error(dec.x, truth);
            rec.support_exact = support_match(dec.x, signal.support);
            if (std::abs(c) >= 1e-6) rec.linf_err_scaled = (dec.x / c - truth).lpNorm<Eigen::Infinity>();
        } catch (const std::exception& e) {
            rec.wall_time_s = seconds_since(t0);
            rec.error = e.what();
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<TrialRecord> run_trials(const ExperimentPlan& plan) {
    plan.validate();
    const std::size_t cells = plan.grid.size() * static_cast<std::size_t>(plan.replications);
    const std::size_t per_cell = plan.methods.size();
    std::vector<TrialRecord> records(cells * per_cell);

    parallel_for_index(cells, plan.threads, [&](std::size_t cell) {
        const int config_index = static_cast<int>(cell / static_cast<std::size_t>(plan.replications));
        const int replication = static_cast<int>(cell % static_cast<std::size_t>(plan.replications));
        auto cell_records = run_single_trial(plan, config_index, replication);
        for (std::size_t j = 0; j < per_cell; ++j) records[cell * per_cell + j] = std::move(cell_records[j]);
    });
    return records;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");

    std::vector<AggregateRow> rows;
    std::map<std::pair<int, std::string>, std::size_t> slot; // (config_index, method) -> row
    for (const TrialRecord& rec : records) {
        const auto key = std::make_pair(rec.config_index, to_string(rec.method));
        auto it = slot.find(key);
        if (it == slot.end()) {
            it = slot.emplace(key, rows.size()).first;
            AggregateRow row;
            row.config = rec.config;
            row.config_index = rec.config_index;
            row.method = rec.method;
            rows.push_back(row);
        }
        AggregateRow& row = rows[it->second];
        ++row.trial_count;
        if (rec.error.empty()) {
            row.mean_time_s += rec.wall_time_s;
            row.mean_l2_err += rec.l2_err;
            row.pre_percent += rec.support_exact ? 1.0 : 0.0;
            row.mean_iterations += rec.iterations;
        }
    }
    for (AggregateRow& row : rows) {
        const double n = row.trial_count;
        row.mean_time_s /= n;
        row.mean_l2_err /= n;
        row.pre_percent *= 100.0 / n;
        row.mean_iterations /= n;
    }
    std::sort(rows.begin(), rows.end(), [](const AggregateRow& a, const AggregateRow& b) {
        if (a.config_index != b.config_index) return a.config_index < b.config_index;
        return to_string(a.method) < to_string(b.method);
    });
    return rows;
}

double psnr(const Eigen::VectorXd& reference, const Eigen::VectorXd& estimate) {
    if (reference.size() != estimate.size()) throw std::invalid_argument("psnr: length mismatch");
    if (reference.size() == 0) throw std::invalid_argument("psnr: empty input");
    const double peak = reference.lpNorm<Eigen::Infinity>();
    const double mse = (reference - estimate).squaredNorm() / static_cast<double>(reference.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

WaveletTrial wavelet_experiment(const ProblemConfig& config, const std::vector<Method>& methods,
                                int level, SignalValues kind, double eta, int max_iter, Rng& rng) {
    config.validate();
    if (methods.empty()) throw std::invalid_argument("wavelet_experiment: no methods");
    const HaarTransform haar(level, config.n);

    const SparseSignal coeffs = make_signal(config.n, config.s, rng, kind);
    const SensingEnsemble gaussian = sample_matrix(config.m, config.n, config.nu, rng);
    SensingEnsemble effective{wavelet_sensing_matrix(gaussian.matrix, haar), config.nu};
    const BinaryObservation obs = observe(effective, coeffs, config.sigma, config.flip_prob, rng);

    WaveletTrial trial;
    trial.signal = haar.synthesize(coeffs.dense());
    const Eigen::VectorXd truth = coeffs.dense();
    const double c = effective_scale(config.sigma, config.flip_prob);

    for (Method method : methods) {
        WaveletOutcome outcome;
        TrialRecord& rec = outcome.record;
        rec.config = config;
        rec.method = method;
        const auto t0 = Clock::now();
        try {
            DecodeResult dec = decode_with(method, effective.matrix, obs.y, config.s, eta, max_iter);
            rec.wall_time_s = seconds_since(t0);
            rec.iterations = dec.iterations;
            rec.l2_err = l2_error(dec.x, truth);
            rec.support_exact = support_match(dec.x, coeffs.support);
            if (std::abs(c) >= 1e-6) rec.linf_err_scaled = (dec.x / c - truth).lpNorm<Eigen::Infinity>();
            const double nrm = dec.x.norm();
            outcome.reconstruction = haar.synthesize(nrm > 0.0 ? (dec.x / nrm).eval() : dec.x);
            outcome.psnr_db = psnr(trial.signal, outcome.reconstruction);
        } catch (const std::exception& e) {
            rec.wall_time_s = seconds_since(t0);
            rec.error = e.what();
            outcome.reconstruction = Eigen::VectorXd::Zero(config.n);
            outcome.psnr_db = -std::numeric_limits<double>::infinity();
        }
        trial.outcomes.push_back(std::move(outcome));
    }
    return trial;
}

std::vector<WaveletTrial> run_wavelet_trials(const ProblemConfig& config,
                                             const std::vector<Method>& methods, int level,
                                             SignalValues kind, double eta, int max_iter,
                                             int replications, std::uint64_t base_seed, int threads) {
    if (replications < 1) throw std::invalid_argument("run_wavelet_trials: replications must be >= 1");
    std::vector<WaveletTrial> trials(static_cast<std::size_t>(replications));
    parallel_for_index(trials.size(), threads, [&](std::size_t r) {
        Rng rng = make_stream(base_seed, 0, r);
        trials[r] = wavelet_experiment(config, methods, level, kind, eta, max_iter, rng);
        for (auto& outcome : trials[r].outcomes) outcome.record.replication = static_cast<int>(r);
    });
    return trials;
}

namespace {

nlohmann::json record_json(const TrialRecord& rec) {
    nlohmann::json j{{"m", rec.config.m},
                     {"n", rec.config.n},
                     {"s", rec.config.s},
                     {"nu", rec.config.nu},
                     {"sigma", rec.config.sigma},
                     {"flip_prob", rec.config.flip_prob},
                     {"seed", rec.config.seed},
                     {"config_index", rec.config_index},
                     {"replication", rec.replication},
                     {"method", to_string(rec.method)},
                     {"l2_err", rec.l2_err},
                     {"support_exact", rec.support_exact},
                     {"iterations", rec.iterations},
                     {"wall_time_s", rec.wall_time_s}};
    j["linf_err_scaled"] =
        rec.linf_err_scaled ? nlohmann::json(*rec.linf_err_scaled) : nlohmann::json();
    if (!rec.error.empty()) j["error"] = rec.error;
    return j;
}

struct CurvePoint {
    double sum = 0.0, sum_sq = 0.0;
    int n = 0;
    int hits = 0;
    void add(double err, bool hit) {
        sum += err;
        sum_sq += err * err;
        ++n;
        hits += hit ? 1 : 0;
    }
};

} // namespace

EmitPaths emit(const std::vector<AggregateRow>& rows, const std::vector<TrialRecord>& records,
               const ExperimentPlan& plan, const std::filesystem::path& out_dir,
               const std::string& stem) {
    std::filesystem::create_directories(out_dir);
    EmitPaths paths;

    paths.csv = out_dir / (stem + "_aggregate.csv");
    {
        std::ofstream csv(paths.csv);
        if (!csv) throw std::runtime_error("emit: cannot open " + paths.csv.string());
        csv << "m,n,s,nu,sigma,flip_prob,method,time_s,l2_err,pre_percent,iterations,trials\n";
        for (const AggregateRow& row : rows) {
            csv << row.config.m << ',' << row.config.n << ',' << row.config.s << ','
                << format_double(row.config.nu) << ',' << format_double(row.config.sigma) << ','
                << format_double(row.config.flip_prob) << ',' << to_string(row.method) << ','
                << format_double(row.mean_time_s) << ',' << format_double(row.mean_l2_err) << ','
                << format_double(row.pre_percent) << ',' << format_double(row.mean_iterations) << ','
                << row.trial_count << '\n';
        }
    }

    paths.records_json = out_dir / (stem + "_records.json");
    {
        nlohmann::json j = nlohmann::json::array();
        for (const TrialRecord& rec : records) j.push_back(record_json(rec));
        std::ofstream out(paths.records_json);
        if (!out) throw std::runtime_error("emit: cannot open " + paths.records_json.string());
        out << j.dump(1) << '\n';
    }

    // Plot data: one (x, y, stderr) file per method for the support-recovery
    // probability and the mean error curves.
    std::map<std::string, std::map<int, CurvePoint>> curves;
    for (const TrialRecord& rec : records)
        if (rec.error.empty())
            curves[to_string(rec.method)][rec.config_index].add(rec.l2_err, rec.support_exact);

    for (const auto& [method, by_config] : curves) {
        const auto pre_path = out_dir / (stem + "_pre_" + method + ".dat");
        const auto err_path = out_dir / (stem + "_err_" + method + ".dat");
        std::ofstream pre(pre_path), err(err_path);
        if (!pre || !err)
            throw std::runtime_error("emit: cannot open plot data under " + out_dir.string());
        pre << "# " << (plan.sweep_key.empty() ? "config_index" : plan.sweep_key)
            << " pre_percent stderr\n";
        err << "# " << (plan.sweep_key.empty() ? "config_index" : plan.sweep_key)
            << " mean_l2_err stderr\n";
        for (const auto& [config_index, pt] : by_config) {
            const double x = plan.plot_x(config_index);
            const double n = pt.n;
            const double phat = pt.hits / n;
            const double mean = pt.sum / n;
            const double var = pt.n > 1 ? std::max(0.0, (pt.sum_sq - n * mean * mean) / (n - 1)) : 0.0;
            pre << format_double(x) << ' ' << format_double(100.0 * phat) << ' '
                << format_double(100.0 * std::sqrt(phat * (1.0 - phat) / n)) << '\n';
            err << format_double(x) << ' ' << format_double(mean) << ' '
                << format_double(std::sqrt(var / n)) << '\n';
        }
        paths.plot_data.push_back(pre_path);
        paths.plot_data.push_back(err_path);
    }
    return paths;
}

std::vector<AggregateRow> read_aggregate_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_aggregate_csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_aggregate_csv: empty file");
    if (line != "m,n,s,nu,sigma,flip_prob,method,time_s,l2_err,pre_percent,iterations,trials")
        throw std::runtime_error("read_aggregate_csv: unexpected header: " + line);

    std::vector<AggregateRow> rows;
    int index = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::vector<std::string> fields;
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 12)
            throw std::runtime_error("read_aggregate_csv: malformed row: " + line);
        AggregateRow row;
        row.config.m = std::stoi(fields[0]);
        row.config.n = std::stoi(fields[1]);
        row.config.s = std::stoi(fields[2]);
        row.config.nu = std::stod(fields[3]);
        row.config.sigma = std::stod(fields[4]);
        row.config.flip_prob = std::stod(fields[5]);
        row.method = method_from_string(fields[6]);
        row.mean_time_s = std::stod(fields[7]);
        row.mean_l2_err = std::stod(fields[8]);
        row.pre_percent = std::stod(fields[9]);
        row.mean_iterations = std::stod(fields[10]);
        row.trial_count = std::stoi(fields[11]);
        row.config_index = index++;
        rows.push_back(row);
    }
    return rows;
}

} // namespace onebit
