#include "lqro/config.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "lqro/errors.hpp"

#ifndef LQRO_VERSION
#define LQRO_VERSION "0.0.0"
#endif

namespace lqro {
namespace {

using json = nlohmann::json;

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class Reader {
public:
    explicit Reader(const std::map<std::string, std::string>& v) : v_(v) {}

    double number(const std::string& key) {
        const auto& s = v_.at(key);
        try {
            std::size_t pos = 0;
            const double x = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return x;
        } catch (const std::exception&) {
            errors_.push_back(key + ": not a number: '" + s + "'");
            return 0.0;
        }
    }

    int integer(const std::string& key) {
        const auto& s = v_.at(key);
        long long x = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ec != std::errc() || p != s.data() + s.size()) {
            errors_.push_back(key + ": not an integer: '" + s + "'");
            return 0;
        }
        return static_cast<int>(x);
    }

    std::uint64_t u64(const std::string& key) {
        const auto& s = v_.at(key);
        std::uint64_t x = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ec != std::errc() || p != s.data() + s.size()) errors_.push_back(key + ": not an unsigned integer: '" + s + "'");
        return x;
    }

    bool is_none(const std::string& key) const {
        const auto& s = v_.at(key);
        return s.empty() || s == "none";
    }

    std::vector<double> list(const std::string& key) {
        std::vector<double> out;
        if (is_none(key)) return out;
        std::stringstream ss(v_.at(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            try {
                std::size_t pos = 0;
                out.push_back(std::stod(item, &pos));
                if (pos != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                errors_.push_back(key + ": bad list entry '" + item + "'");
            }
        }
        return out;
    }

    const std::string& text(const std::string& key) const { return v_.at(key); }
    void fail(std::string msg) { errors_.push_back(std::move(msg)); }
    std::vector<std::string>& errors() { return errors_; }

private:
    const std::map<std::string, std::string>& v_;
    std::vector<std::string> errors_;
};

}  // namespace

const std::map<std::string, std::string>& config_defaults() {
    static const std::map<std::string, std::string> d = {
        {"kappa_over_2pi_hz", "1e6"},
        {"omega_r_over_2pi_hz", "6.6e9"},
        {"omega_q_over_2pi_hz", "5e9"},
        {"t_f_s", "auto"},  // 6 pi / (100 kappa)
        {"n_grid", "5001"},
        {"n_max", "50"},
        {"g_max_over_2pi_hz", "none"},
        {"gz0_base_over_2pi_hz", "21e6"},
        {"n_basis", "16"},
        {"w_tf", "1.0"},
        {"w_avg", "0.5"},
        {"lambda_n", "1000"},
        {"lambda_area", "1"},
        {"lambda_g", "1000"},
        {"epsilon", "1e-3"},
        {"eta", "1.0"},
        {"s_eff", "calibrated"},
        {"seed_snr_target", "3.8"},
        {"rng_seed", "20240607"},
        {"ppo.batch_size", "64"},
        {"ppo.epochs", "4"},
        {"ppo.clip_eps", "0.2"},
        {"ppo.learning_rate", "0.03"},
        {"ppo.init_std_frac", "0.1"},
        {"ppo.baseline_ema", "0.9"},
        {"ppo.max_iterations", "500"},
        {"ppo.target_snr", "none"},
        {"ppo.seed_mode", "seeded"},
        {"ppo.unseeded_scale_over_2pi_hz", "auto"},
        {"ppo.feasibility_tol_frac", "0.02"},
        {"sweep.g_max_over_2pi_hz", "50e6, 65e6, 80e6, 100e6, 130e6"},
        {"sweep.n_max", "30, 40, 50"},
        {"robust.timing_frac", "0, 0.025, 0.05, 0.075, 0.1"},
        {"robust.amplitude_frac", "0, 0.025, 0.05, 0.075, 0.1"},
        {"robust.resolution", "5"},
        {"bench.targets", "auto"},
        {"bench.runs", "5"},
        {"bench.iterations", "300"},
        {"histogram.shots", "20000"},
    };
    return d;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<std::string> errors;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
            continue;
        }
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    if (!errors.empty()) {
        std::string msg = "config parse errors:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return out;
}

Config build_config(const std::map<std::string, std::string>& values) {
    std::map<std::string, std::string> v = config_defaults();
    std::vector<std::string> unknown;
    for (const auto& [k, val] : values) {
        if (!v.count(k))
            unknown.push_back("unknown key '" + k + "'");
        else
            v[k] = val;
    }

    Reader r(v);
    for (auto& u : unknown) r.fail(std::move(u));
    Config c;
    auto& p = c.params;
    p.kappa = kTwoPi * r.number("kappa_over_2pi_hz");
    p.omega_r = kTwoPi * r.number("omega_r_over_2pi_hz");
    p.omega_q = kTwoPi * r.number("omega_q_over_2pi_hz");
    p.t_f = r.text("t_f_s") == "auto" ? 6.0 * std::numbers::pi / (100.0 * p.kappa) : r.number("t_f_s");
    p.n_grid = r.integer("n_grid");
    p.n_max = r.number("n_max");
    if (!r.is_none("g_max_over_2pi_hz")) p.g_max = kTwoPi * r.number("g_max_over_2pi_hz");
    c.gz0_base = kTwoPi * r.number("gz0_base_over_2pi_hz");
    c.n_basis = r.integer("n_basis");

    auto& w = c.weights;
    w.w_tf = r.number("w_tf");
    w.w_avg = r.number("w_avg");
    w.lambda_n = r.number("lambda_n");
    w.lambda_area = r.number("lambda_area");
    w.lambda_g = r.number("lambda_g");
    w.epsilon = r.number("epsilon");
    p.eta = r.number("eta");
    c.s_eff_calibrated = r.text("s_eff") == "calibrated";
    if (!c.s_eff_calibrated) p.s_eff = r.number("s_eff");
    c.seed_snr_target = r.number("seed_snr_target");
    c.rng_seed = r.u64("rng_seed");

    auto& q = c.ppo;
    q.batch_size = r.integer("ppo.batch_size");
    q.epochs = r.integer("ppo.epochs");
    q.clip_eps = r.number("ppo.clip_eps");
    q.learning_rate = r.number("ppo.learning_rate");
    q.init_std_frac = r.number("ppo.init_std_frac");
    q.baseline_ema = r.number("ppo.baseline_ema");
    q.max_iterations = r.integer("ppo.max_iterations");
    if (!r.is_none("ppo.target_snr")) q.target_snr = r.number("ppo.target_snr");
    try {
        q.seed_mode = seed_mode_from_string(r.text("ppo.seed_mode"));
    } catch (const ConfigError& e) {
        r.fail(e.what());
    }
    q.unseeded_scale = r.text("ppo.unseeded_scale_over_2pi_hz") == "auto"
                           ? 0.0
                           : kTwoPi * r.number("ppo.unseeded_scale_over_2pi_hz");
    q.feasibility_tol = r.number("ppo.feasibility_tol_frac");

    for (double g : r.list("sweep.g_max_over_2pi_hz")) c.sweep_g_max.push_back(kTwoPi * g);
    c.sweep_n_max = r.list("sweep.n_max");
    c.robust_timing = r.list("robust.timing_frac");
    c.robust_amplitude = r.list("robust.amplitude_frac");
    c.robust_resolution = r.integer("robust.resolution");
    if (r.text("bench.targets") != "auto") c.bench_targets = r.list("bench.targets");
    c.bench_runs = r.integer("bench.runs");
    c.bench_iterations = r.integer("bench.iterations");
    c.histogram_shots = r.integer("histogram.shots");

    auto& errors = r.errors();
    for (auto& e : p.violations()) errors.push_back(e);
    for (auto& e : w.violations()) {
        if (e != "a_seed > 0") errors.push_back(e);
    }
    for (auto& e : q.violations()) errors.push_back(e);
    if (c.n_basis < 8) errors.emplace_back("n_basis >= 8");
    if (!(c.gz0_base > 0.0)) errors.emplace_back("gz0_base > 0");
    if (!(c.seed_snr_target > 0.0)) errors.emplace_back("seed_snr_target > 0");
    if (c.robust_resolution < 2) errors.emplace_back("robust.resolution >= 2");
    if (c.bench_runs < 1) errors.emplace_back("bench.runs >= 1");
    if (c.bench_iterations < 0) errors.emplace_back("bench.iterations >= 0");
    if (c.histogram_shots < 1) errors.emplace_back("histogram.shots >= 1");
    for (double t : c.robust_timing) {
        if (!(std::abs(t) < 1.0)) errors.emplace_back("robust.timing_frac entries in (-1, 1)");
    }
    if (!errors.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    c.source = std::move(v);
    return c;
}

Config parse_config(const std::string& text) { return build_config(parse_key_values(text)); }

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

Config with_override(const Config& config, const std::string& key, const std::string& value) {
    auto v = config.source;
    v[key] = value;
    return build_config(v);
}

std::string dump_config(const Config& config) {
    std::ostringstream out;
    for (const auto& [k, v] : config.source) out << k << " = " << v << '\n';
    return out.str();
}

void emit_timeseries(const std::filesystem::path& path, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != columns.size())
            throw DomainError(path.string() + ": row " + std::to_string(i) + " has " +
                              std::to_string(rows[i].size()) + " values, header has " +
                              std::to_string(columns.size()));
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << columns[j];
    out << '\n';
    char buf[32];
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", row[j]);
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void save_pulse(const std::filesystem::path& path, const SplinePulse& pulse) {
    json j;
    j["format"] = "lqro-spline-pulse";
    j["version"] = 1;
    j["degree"] = SplineBasis::kDegree;
    j["t_f_s"] = pulse.t_f();
    j["knots_s"] = pulse.basis().knots();
    j["coeffs_rad_per_s"] = pulse.coeffs();
    j["units"] = "coefficients are angular frequencies g_c / (rad/s); knots and t_f in seconds";
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

SplinePulse load_pulse(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read pulse file " + path.string());
    json j;
    try {
        in >> j;
        if (j.at("format") != "lqro-spline-pulse") throw DomainError("not a spline pulse document");
        if (j.at("degree").get<int>() != SplineBasis::kDegree) throw DomainError("only cubic pulses are supported");
        auto basis = SplineBasis::from_knots(j.at("knots_s").get<std::vector<double>>());
        return {std::move(basis), j.at("coeffs_rad_per_s").get<std::vector<double>>()};
    } catch (const json::exception& e) {
        throw DomainError(path.string() + ": " + e.what());
    }
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
    json j;
    j["command"] = m.command;
    j["config"] = m.config.source;
    j["rng_seed"] = m.config.rng_seed;
    j["units"] = "config rates are f = omega / 2 pi in Hz; internal rates are rad/s; times in s";
    j["derived"] = m.derived;
    j["artifacts"] = m.artifacts;
    j["version"] = m.version;
    j["started_utc"] = m.started_utc;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

Config config_from_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read manifest " + path.string());
    json j;
    in >> j;
    return build_config(j.at("config").get<std::map<std::string, std::string>>());
}

std::string version_string() { return LQRO_VERSION; }

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

}  // namespace lqro
