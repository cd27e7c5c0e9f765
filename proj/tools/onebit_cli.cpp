#include <cmath>
#include <cstdint>
#include <numeric>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "onebit/baselines.hpp"
#include "onebit/bench.hpp"
#include "onebit/diagnostics.hpp"
#include "onebit/io.hpp"
#include "onebit/model.hpp"
#include "onebit/solver.hpp"

namespace {

using namespace onebit;

void write_or_print(const nlohmann::json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(1) << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    out << j.dump(1) << '\n';
    std::cout << "wrote " << out_path << '\n';
}

void print_rows(const ExperimentPlan& plan, const std::vector<AggregateRow>& rows) {
    const std::string x_name = plan.sweep_key.empty() ? "cell" : plan.sweep_key;
    std::printf("%-10s %-7s %10s %10s %8s %8s %7s\n", x_name.c_str(), "method", "time_s",
                "l2_err", "PrE(%)", "iters", "trials");
    for (const auto& row : rows)
        std::printf("%-10g %-7s %10.3e %10.3e %8.1f %8.2f %7d\n", plan.plot_x(row.config_index),
                    to_string(row.method).c_str(), row.mean_time_s, row.mean_l2_err,
                    row.pre_percent, row.mean_iterations, row.trial_count);
}

void run_plan(ExperimentPlan plan, const std::string& out_dir, const std::string& stem) {
    const auto records = run_trials(plan);
    const auto rows = aggregate(records);
    print_rows(plan, rows);
    const auto paths = emit(rows, records, plan, out_dir, stem);
    std::cout << "wrote " << paths.csv.string() << ", " << paths.records_json.string() << " and "
              << paths.plot_data.size() << " plot-data files\n";
}

struct WaveletPreset {
    ProblemConfig config;
    int level = 1;
};

void run_wavelet_preset(const WaveletPreset& preset, const std::vector<Method>& methods, int reps,
                        std::uint64_t seed, int threads, const std::string& out_dir,
                        const std::string& stem) {
    const auto trials = run_wavelet_trials(preset.config, methods, preset.level,
                                           SignalValues::flat, 0.9, 5, reps, seed, threads);
    std::filesystem::create_directories(out_dir);
    nlohmann::json records = nlohmann::json::array();
    std::printf("%-7s %12s %12s %10s\n", "method", "mean_psnr", "median_psnr", "time_s");
    for (std::size_t j = 0; j < methods.size(); ++j) {
        std::vector<double> psnrs;
        double time_sum = 0.0;
        for (const auto& trial : trials) {
            const auto& outcome = trial.outcomes[j];
            psnrs.push_back(outcome.psnr_db);
            time_sum += outcome.record.wall_time_s;
            nlohmann::json rec{{"method", to_string(methods[j])},
                               {"replication", outcome.record.replication},
                               {"l2_err", outcome.record.l2_err},
                               {"support_exact", outcome.record.support_exact},
                               {"wall_time_s", outcome.record.wall_time_s}};
            rec["psnr_db"] = std::isfinite(outcome.psnr_db) ? nlohmann::json(outcome.psnr_db)
                                                            : nlohmann::json();
            records.push_back(std::move(rec));
        }
        std::sort(psnrs.begin(), psnrs.end());
        const double mean = std::accumulate(psnrs.begin(), psnrs.end(), 0.0) / psnrs.size();
        const double median = psnrs[psnrs.size() / 2];
        std::printf("%-7s %12.2f %12.2f %10.3e\n", to_string(methods[j]).c_str(), mean, median,
                    time_sum / trials.size());
    }
    if (methods.size() >= 2) {
        int wins = 0;
        for (const auto& trial : trials) wins += trial.outcomes[0].psnr_db > trial.outcomes[1].psnr_db;
        std::printf("%s beats %s on PSNR in %d/%zu trials\n", to_string(methods[0]).c_str(),
                    to_string(methods[1]).c_str(), wins, trials.size());
    }
    const auto json_path = std::filesystem::path(out_dir) / (stem + "_records.json");
    std::ofstream out(json_path);
    out << records.dump(1) << '\n';
    std::cout << "wrote " << json_path.string() << '\n';
}

ExperimentPlan preset_plan(const std::string& name, bool full) {
    ExperimentPlan plan;
    ProblemConfig base;
    base.m = 500;
    base.n = 1000;
    const auto sweep = [&plan, &base](const std::string& key, const std::string& range) {
        plan.sweep_key = key;
        plan.sweep_values = parse_sweep(range);
        for (double v : plan.sweep_values) {
            ProblemConfig cfg = base;
            if (key == "s") cfg.s = static_cast<int>(v);
            else if (key == "sigma") cfg.sigma = v;
            else cfg.flip_prob = v;
            plan.grid.push_back(cfg);
        }
    };

    if (name == "fig1" || name == "fig2a") {
        base.nu = 0.1;
        base.sigma = 0.05;
        base.flip_prob = 0.01;
        plan.max_iter = name == "fig1" ? 10 : 5;
        sweep("s", "1:2:20");
    } else if (name == "fig2b") {
        base.s = 10;
        base.nu = 0.3;
        base.flip_prob = 0.05;
        sweep("sigma", "0:0.1:1");
    } else if (name == "fig2c") {
        base.s = 5;
        base.nu = 0.1;
        base.sigma = 0.05;
        sweep("flip_prob", "0:0.02:0.20");
    } else if (name == "fig2d") {
        base.s = 5;
        base.nu = 0.1;
        base.sigma = 0.05;
        sweep("flip_prob", "0.80:0.02:1.00");
    } else if (name.rfind("table1", 0) == 0 && name.size() == 7) {
        base.m = full ? 1000 : 500;
        base.n = full ? 5000 : 2500;
        base.s = full ? 10 : 5;
        const char cell = name[6];
        if (cell == 'a') { base.nu = 0.2; base.sigma = 0.2; base.flip_prob = 0.05; }
        else if (cell == 'b') { base.nu = 0.3; base.sigma = 0.3; base.flip_prob = 0.10; }
        else if (cell == 'c') { base.nu = 0.5; base.sigma = 0.5; base.flip_prob = 0.15; }
        else throw std::runtime_error("unknown preset '" + name + "'");
        plan.methods = {Method::gna, Method::biht, Method::lp};
        plan.grid = {base};
    } else {
        throw std::runtime_error("unknown preset '" + name + "'");
    }
    return plan;
}

int run(int argc, char** argv) {
    CLI::App app{"1-bit compressed sensing decoders and experiment harness"};
    app.require_subcommand(1);

    // --- gen ---
    auto* gen = app.add_subcommand("gen", "generate a data set into a binary container");
    std::string gen_config, gen_out = "dataset.ob1t";
    ProblemConfig gcfg;
    gcfg.m = 500; gcfg.n = 1000; gcfg.s = 5; gcfg.seed = 1;
    gen->add_option("--config", gen_config, "problem config file (key=value)");
    auto* gm = gen->add_option("--m", gcfg.m);
    auto* gn = gen->add_option("--n", gcfg.n);
    auto* gs = gen->add_option("--s", gcfg.s);
    auto* gnu = gen->add_option("--nu", gcfg.nu);
    auto* gsig = gen->add_option("--sigma", gcfg.sigma);
    auto* gq = gen->add_option("--flip-prob", gcfg.flip_prob);
    auto* gseed = gen->add_option("--seed", gcfg.seed);
    gen->add_option("--out", gen_out, "output container path");
    gen->callback([&] {
        ProblemConfig config = gcfg;
        if (!gen_config.empty()) {
            config = read_problem_config(gen_config);
            if (gm->count()) config.m = gcfg.m;
            if (gn->count()) config.n = gcfg.n;
            if (gs->count()) config.s = gcfg.s;
            if (gnu->count()) config.nu = gcfg.nu;
            if (gsig->count()) config.sigma = gcfg.sigma;
            if (gq->count()) config.flip_prob = gcfg.flip_prob;
            if (gseed->count()) config.seed = gcfg.seed;
        }
        config.validate();
        Rng rng = make_stream(config.seed);
        const SparseSignal signal = make_signal(config.n, config.s, rng, SignalValues::flat);
        const SensingEnsemble ensemble = sample_matrix(config.m, config.n, config.nu, rng);
        const BinaryObservation obs = observe(ensemble, signal, config.sigma, config.flip_prob, rng);
        write_dataset(gen_out, ensemble.matrix, obs.y, obs.flip_mask, config.s);
        std::cout << "wrote " << gen_out << " (m=" << config.m << ", n=" << config.n
                  << ", s=" << config.s << ")\n";
    });

    // --- solve ---
    auto* solve = app.add_subcommand("solve", "decode a container and print the estimate as JSON");
    std::string solve_in, solve_method = "gna", solve_out;
    int solve_s = 0, solve_max_iter = 5;
    double solve_eta = 0.9;
    solve->add_option("--in", solve_in, "dataset container")->required();
    solve->add_option("--method", solve_method, "gna|biht|lp|oracle");
    solve->add_option("--s", solve_s, "sparsity override (default: container header)");
    solve->add_option("--eta", solve_eta, "GNA step size");
    solve->add_option("--max-iter", solve_max_iter, "GNA iteration cap");
    solve->add_option("--out", solve_out, "write JSON here instead of stdout");
    solve->callback([&] {
        const Dataset ds = read_dataset(solve_in);
        const int s = solve_s > 0 ? solve_s : ds.s;
        const Method method = method_from_string(solve_method);
        if (method == Method::gna) {
            SolverOptions opts;
            opts.s = s;
            opts.eta = solve_eta;
            opts.max_iter = solve_max_iter;
            write_or_print(solver_report_json(run_gna(ds.psi, ds.y, opts)), solve_out);
        } else {
            const DecodeResult dec = decode_with(method, ds.psi, ds.y, s, solve_eta, solve_max_iter);
            write_or_print(sparse_estimate_json(dec.x, dec.iterations), solve_out);
        }
    });

    // --- bench ---
    auto* bench = app.add_subcommand("bench", "run a plan file and emit CSV/JSON/plot data");
    std::string plan_path, bench_out_dir = "out";
    int bench_reps = 0, bench_threads = 0;
    std::uint64_t bench_seed = 0;
    bool bench_seed_set = false;
    bench->add_option("--plan", plan_path, "plan file (key=value, one key may sweep a:b:c)")
        ->required();
    bench->add_option("--reps", bench_reps, "override replications");
    bench->add_option("--seed", bench_seed, "override base seed")
        ->each([&](const std::string&) { bench_seed_set = true; });
    bench->add_option("--out-dir", bench_out_dir, "output directory");
    bench->add_option("--threads", bench_threads, "worker threads (0 = hardware)");
    bench->callback([&] {
        ExperimentPlan plan = read_plan(plan_path);
        if (bench_reps > 0) plan.replications = bench_reps;
        if (bench_seed_set) plan.base_seed = bench_seed;
        if (bench_threads > 0) plan.threads = bench_threads;
        const std::string stem = !plan.out_prefix.empty()
                                     ? plan.out_prefix
                                     : std::filesystem::path(plan_path).stem().string();
        run_plan(std::move(plan), bench_out_dir, stem);
    });

    // --- diag ---
    auto* diag = app.add_subcommand("diag", "restricted-spectrum and cone-constant estimates");
    std::string diag_in, diag_out;
    int diag_s = 0, diag_samples = 20000;
    std::int64_t diag_budget = 20000;
    std::uint64_t diag_seed = 1;
    diag->add_option("--in", diag_in, "dataset container")->required();
    diag->add_option("--s", diag_s, "sparsity override (default: container header)");
    diag->add_option("--budget", diag_budget, "max supports to enumerate/sample");
    diag->add_option("--samples", diag_samples, "cone-constant sample count");
    diag->add_option("--seed", diag_seed, "sampling seed");
    diag->add_option("--out", diag_out, "write JSON here instead of stdout");
    diag->callback([&] {
        const Dataset ds = read_dataset(diag_in);
        const int s = diag_s > 0 ? diag_s : ds.s;
        Rng spectrum_rng = make_stream(diag_seed, 1);
        Rng cone_rng = make_stream(diag_seed, 2);
        const RestrictedSpectrum spectrum = restricted_spectrum(ds.psi, s, diag_budget, spectrum_rng);
        const ConeConstants cone = cone_constants(ds.psi, s, diag_samples, cone_rng);
        write_or_print(diagnostics_json(spectrum, cone, eta_bound(spectrum.c2s_max, s)), diag_out);
    });

    // --- repro ---
    auto* repro = app.add_subcommand("repro", "run a named desk-scale reproduction preset");
    std::string preset, repro_out_dir = "out";
    int repro_reps = 100, repro_threads = 0;
    std::uint64_t repro_seed = 20240901;
    bool repro_full = false;
    repro->add_option("preset", preset,
                      "fig1|fig2a|fig2b|fig2c|fig2d|table1a|table1b|table1c|wavelet1d")
        ->required();
    repro->add_option("--reps", repro_reps, "replications");
    repro->add_option("--seed", repro_seed, "base seed");
    repro->add_option("--out-dir", repro_out_dir, "output directory");
    repro->add_option("--threads", repro_threads, "worker threads (0 = hardware)");
    repro->add_flag("--full", repro_full, "full-scale variant where one exists");
    repro->callback([&] {
        if (preset == "wavelet1d") {
            WaveletPreset wp;
            wp.config.m = repro_full ? 2500 : 600;
            wp.config.n = repro_full ? 8000 : 2048;
            wp.config.s = repro_full ? 36 : 12;
            wp.config.sigma = 0.5;
            wp.config.flip_prob = 0.06;
            wp.config.seed = repro_seed;
            run_wavelet_preset(wp, {Method::gna, Method::biht}, repro_reps, repro_seed,
                               repro_threads, repro_out_dir, preset);
            return;
        }
        ExperimentPlan plan = preset_plan(preset, repro_full);
        plan.replications = repro_reps;
        plan.base_seed = repro_seed;
        plan.threads = repro_threads;
        for (auto& cfg : plan.grid) cfg.seed = repro_seed;
        run_plan(std::move(plan), repro_out_dir, preset);
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
