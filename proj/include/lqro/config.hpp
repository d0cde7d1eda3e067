#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lqro/params.hpp"
#include "lqro/ppo.hpp"
#include "lqro/reward.hpp"
#include "lqro/seed.hpp"

namespace lqro {

/// Everything a run needs, in internal units (rad/s, s). Built from a flat
/// key-value file by load_config(); every field has a default reproducing
/// the reference parameter set.
struct Config {
    SystemParams params;
    RewardWeights weights;  ///< a_seed is filled in from the calibrated seed
    PpoConfig ppo;
    double gz0_base = kTwoPi * 21e6;
    int n_basis = 16;
    /// s_eff: explicit value, or calibrated so the scaled seed reaches seed_snr_target.
    bool s_eff_calibrated = true;
    double seed_snr_target = 3.8;
    std::uint64_t rng_seed = 20240607;

    std::vector<double> sweep_g_max;  ///< rad/s
    std::vector<double> sweep_n_max{30.0, 40.0, 50.0};

    std::vector<double> robust_timing{0.0, 0.025, 0.05, 0.075, 0.1};
    std::vector<double> robust_amplitude{0.0, 0.025, 0.05, 0.075, 0.1};
    int robust_resolution = 5;

    std::vector<double> bench_targets;  ///< empty: derived from the seed SNR
    int bench_runs = 5;
    int bench_iterations = 300;

    int histogram_shots = 20000;

    /// Effective key-value text (defaults merged with overrides) the fields
    /// above were derived from.
    std::map<std::string, std::string> source;
};

/// Keys accepted in a config file with their default values, as text.
const std::map<std::string, std::string>& config_defaults();

/// Parses `key = value` lines (blank lines and `#` comments ignored).
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Converts file values to internal units, applying defaults for absent
/// keys. Unknown keys and violated invariants are aggregated into one
/// ConfigError.
Config build_config(const std::map<std::string, std::string>& values);
Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);

/// Copy of `config` with one key replaced (for command-line overrides).
Config with_override(const Config& config, const std::string& key, const std::string& value);

/// Flat key-value rendering of config.source; parsing it back yields the same Config.
std::string dump_config(const Config& config);

/// CSV with a header row and 17 significant digits per value.
void emit_timeseries(const std::filesystem::path& path, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

/// Stored pulse: knot vector, coefficients (rad/s), t_f and unit note.
void save_pulse(const std::filesystem::path& path, const SplinePulse& pulse);
SplinePulse load_pulse(const std::filesystem::path& path);

struct RunManifest {
    std::string command;
    Config config;
    std::map<std::string, std::string> derived;  ///< calibration outputs, resolved conventions
    std::vector<std::string> artifacts;
    std::string version;
    std::string started_utc;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
/// Reads the configuration snapshot back out of a manifest.
Config config_from_manifest(const std::filesystem::path& path);

std::string version_string();
std::string utc_timestamp();

}  // namespace lqro
