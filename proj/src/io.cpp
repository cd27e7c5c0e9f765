#include "onebit/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace onebit {

static_assert(std::endian::native == std::endian::little,
              "dataset container assumes a little-endian host");

namespace {

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected key=value");
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected key=value");
        if (!kv.emplace(key, value).second)
            throw std::runtime_error(path.string() + ": duplicate key '" + key + "'");
    }
    return kv;
}

double to_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw std::runtime_error("key '" + key + "': cannot parse '" + value + "' as a number");
    }
    if (used != value.size())
        throw std::runtime_error("key '" + key + "': trailing characters in '" + value + "'");
    return v;
}

int to_int(const std::string& key, const std::string& value) {
    const double v = to_double(key, value);
    if (v != std::floor(v)) throw std::runtime_error("key '" + key + "': expected an integer");
    return static_cast<int>(v);
}

template <typename T>
void write_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("dataset file truncated");
    return v;
}

constexpr char kMagic[4] = {'O', 'B', '1', 'T'};
constexpr std::uint32_t kVersion = 1;

} // namespace

ProblemConfig read_problem_config(const std::filesystem::path& path) {
    const auto kv = read_key_values(path);
    ProblemConfig config;
    for (const auto& [key, value] : kv) {
        if (key == "m") config.m = to_int(key, value);
        else if (key == "n") config.n = to_int(key, value);
        else if (key == "s") config.s = to_int(key, value);
        else if (key == "nu") config.nu = to_double(key, value);
        else if (key == "sigma") config.sigma = to_double(key, value);
        else if (key == "flip_prob") config.flip_prob = to_double(key, value);
        else if (key == "seed") config.seed = std::stoull(value);
        else throw std::runtime_error(path.string() + ": unknown key '" + key + "'");
    }
    config.validate();
    return config;
}

void write_problem_config(const ProblemConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "m=" << config.m << "\nn=" << config.n << "\ns=" << config.s << "\nnu=" << config.nu
        << "\nsigma=" << config.sigma << "\nflip_prob=" << config.flip_prob
        << "\nseed=" << config.seed << '\n';
}

void write_dataset(const std::filesystem::path& path, const Eigen::MatrixXd& psi,
                   const Eigen::VectorXd& y, const std::vector<std::uint8_t>& flip_mask, int s) {
    const auto m = psi.rows();
    const auto n = psi.cols();
    if (y.size() != m || flip_mask.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("write_dataset: y/flip_mask length must equal rows");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out.write(kMagic, 4);
    write_raw(out, kVersion);
    write_raw(out, static_cast<std::uint32_t>(m));
    write_raw(out, static_cast<std::uint32_t>(n));
    write_raw(out, static_cast<std::uint32_t>(s));
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) write_raw(out, psi(i, j));
    for (Eigen::Index i = 0; i < m; ++i)
        write_raw(out, static_cast<std::int8_t>(y[i] >= 0.0 ? 1 : -1));
    out.write(reinterpret_cast<const char*>(flip_mask.data()),
              static_cast<std::streamsize>(flip_mask.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

Dataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error(path.string() + ": not a dataset container (bad magic)");
    const auto version = read_raw<std::uint32_t>(in);
    if (version != kVersion)
        throw std::runtime_error(path.string() + ": unsupported container version " +
                                 std::to_string(version));
    const auto m = static_cast<Eigen::Index>(read_raw<std::uint32_t>(in));
    const auto n = static_cast<Eigen::Index>(read_raw<std::uint32_t>(in));
    Dataset ds;
    ds.s = static_cast<int>(read_raw<std::uint32_t>(in));
    ds.psi.resize(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) ds.psi(i, j) = read_raw<double>(in);
    ds.y.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto v = read_raw<std::int8_t>(in);
        if (v != 1 && v != -1)
            throw std::runtime_error(path.string() + ": y entries must be +-1");
        ds.y[i] = static_cast<double>(v);
    }
    ds.flip_mask.resize(static_cast<std::size_t>(m));
    in.read(reinterpret_cast<char*>(ds.flip_mask.data()), m);
    if (!in) throw std::runtime_error("dataset file truncated");
    return ds;
}

std::vector<double> parse_sweep(const std::string& text) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream ss(text);
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw std::runtime_error("sweep '" + text + "': expected start:step:stop");
    const double start = to_double("sweep", parts[0]);
    const double step = to_double("sweep", parts[1]);
    const double stop = to_double("sweep", parts[2]);
    if (step == 0.0) throw std::runtime_error("sweep '" + text + "': zero step");
    std::vector<double> values;
    // indexed generation plus a tiny slack keeps fp noise from dropping the
    // stop value or letting it creep past a validation bound
    const double slack = std::abs(step) * 1e-9;
    for (int k = 0;; ++k) {
        double v = start + k * step;
        if ((step > 0.0 && v > stop + slack) || (step < 0.0 && v < stop - slack)) break;
        if (std::abs(v - stop) <= slack) v = stop;
        values.push_back(v);
    }
    if (values.empty()) throw std::runtime_error("sweep '" + text + "': empty range");
    return values;
}

ExperimentPlan read_plan(const std::filesystem::path& path) {
    const auto kv = read_key_values(path);
    ExperimentPlan plan;
    ProblemConfig base;
    base.m = 500;
    base.n = 1000;
    base.s = 5;

    std::string sweep_key;
    std::vector<double> sweep_values;
    const auto assign = [&](const std::string& key, const std::string& value, bool integral,
                            auto setter) {
        if (value.find(':') != std::string::npos) {
            if (!sweep_key.empty())
                throw std::runtime_error(path.string() + ": more than one swept key (" + sweep_key +
                                         ", " + key + ")");
            sweep_key = key;
            sweep_values = parse_sweep(value);
            if (integral)
                for (double v : sweep_values)
                    if (v != std::floor(v))
                        throw std::runtime_error(path.string() + ": key '" + key +
                                                 "' sweeps through non-integer values");
        } else {
            const double v = to_double(key, value);
            if (integral && v != std::floor(v))
                throw std::runtime_error(path.string() + ": key '" + key + "' expects an integer");
            setter(v);
        }
    };

    for (const auto& [key, value] : kv) {
        if (key == "m") assign(key, value, true, [&](double v) { base.m = static_cast<int>(v); });
        else if (key == "n") assign(key, value, true, [&](double v) { base.n = static_cast<int>(v); });
        else if (key == "s") assign(key, value, true, [&](double v) { base.s = static_cast<int>(v); });
        else if (key == "nu") assign(key, value, false, [&](double v) { base.nu = v; });
        else if (key == "sigma") assign(key, value, false, [&](double v) { base.sigma = v; });
        else if (key == "flip_prob") assign(key, value, false, [&](double v) { base.flip_prob = v; });
        else if (key == "reps") plan.replications = to_int(key, value);
        else if (key == "seed") plan.base_seed = std::stoull(value);
        else if (key == "eta") plan.eta = to_double(key, value);
        else if (key == "max_iter") plan.max_iter = to_int(key, value);
        else if (key == "threads") plan.threads = to_int(key, value);
        else if (key == "out_prefix") plan.out_prefix = value;
        else if (key == "signal") {
            if (value == "flat") plan.signal_values = SignalValues::flat;
            else if (value == "gauss") plan.signal_values = SignalValues::gaussian;
            else throw std::runtime_error(path.string() + ": signal must be flat|gauss");
        } else if (key == "methods") {
            plan.methods.clear();
            std::istringstream ms(value);
            std::string name;
            while (std::getline(ms, name, ',')) plan.methods.push_back(method_from_string(name));
        } else {
            throw std::runtime_error(path.string() + ": unknown key '" + key + "'");
        }
    }

    base.seed = plan.base_seed;
    if (sweep_key.empty()) {
        plan.grid = {base};
    } else {
        plan.sweep_key = sweep_key;
        plan.sweep_values = sweep_values;
        for (double v : sweep_values) {
            ProblemConfig cfg = base;
            if (sweep_key == "m") cfg.m = static_cast<int>(v);
            else if (sweep_key == "n") cfg.n = static_cast<int>(v);
            else if (sweep_key == "s") cfg.s = static_cast<int>(v);
            else if (sweep_key == "nu") cfg.nu = v;
            else if (sweep_key == "sigma") cfg.sigma = v;
            else cfg.flip_prob = v;
            plan.grid.push_back(cfg);
        }
    }
    plan.validate();
    return plan;
}

nlohmann::json solver_report_json(const SolverReport& report) {
    nlohmann::json pairs = nlohmann::json::array();
    for (Eigen::Index i = 0; i < report.x_hat.size(); ++i)
        if (report.x_hat[i] != 0.0) pairs.push_back({i, report.x_hat[i]});
    return nlohmann::json{{"x_hat", std::move(pairs)},
                          {"iterations", report.iterations},
                          {"converged", report.converged},
                          {"ls_solves", report.ls_solves},
                          {"active_history", report.active_history}};
}

nlohmann::json sparse_estimate_json(const Eigen::VectorXd& x, int iterations) {
    nlohmann::json pairs = nlohmann::json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x[i] != 0.0) pairs.push_back({i, x[i]});
    return nlohmann::json{{"x_hat", std::move(pairs)}, {"iterations", iterations}};
}

nlohmann::json diagnostics_json(const RestrictedSpectrum& spectrum, const ConeConstants& cone,
                                const std::pair<double, double>& eta_bounds) {
    return nlohmann::json{{"c2s_min", spectrum.c2s_min},
                          {"c2s_max", spectrum.c2s_max},
                          {"exhaustive", spectrum.exhaustive},
                          {"c_star_lower", cone.c_star_lower},
                          {"c_star_upper", cone.c_star_upper},
                          {"samples", cone.samples},
                          {"eta_bounds", {eta_bounds.first, eta_bounds.second}}};
}

} // namespace onebit
