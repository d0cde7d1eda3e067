#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lqro/cavity.hpp"
#include "lqro/config.hpp"
#include "lqro/kernels.hpp"
#include "lqro/ppo.hpp"
#include "lqro/seed.hpp"

namespace lqro {

/// (1 + delta_a) g_c(t - delta_t t_f), linearly interpolated, zero outside [0, t_f].
std::vector<double> perturb_pulse(std::span<const double> gc, double delta_t, double delta_a,
                                  const UniformGrid& grid);

/// Minimum SNR(t_f) over a resolution x resolution lattice covering
/// [-bound_t, bound_t] x [-bound_a, bound_a].
double worst_case_snr(std::span<const double> gc, double bound_t, double bound_a,
                      const SystemParams& params, int resolution, Exec exec = Exec::parallel);

/// Calibrated seed, noise density and warm-start fit for one parameter set.
struct Setup {
    SystemParams params;  ///< s_eff calibrated
    RewardWeights weights;  ///< a_seed from the seed
    SeedSpec seed;
    SeedFit fit;
    SplineBasis basis;
};

Setup prepare(const Config& config);

struct ProtocolSeries {
    std::vector<double> gc;
    std::vector<double> gz;
    Trajectory traj;
};

struct ComparisonResult {
    Setup setup;
    ProtocolSeries seed;
    ProtocolSeries ppo;
    TrainResult training;
    HomodyneSample hist_seed;
    HomodyneSample hist_ppo;
};

/// Fraction of the window with N(t) >= level.
double fraction_above(const Trajectory& traj, double level);

/// Seeded training at the configured caps against the polynomial seed.
ComparisonResult run_comparison(const Config& config, Exec exec = Exec::parallel);

struct SweepCell {
    double g_max = 0.0;
    double n_max = 0.0;
    double seed_scale = 0.0;
    bool photon_binding = false;  ///< photon cap, not the coupling cap, fixes the seed scale
    double sta_snr = 0.0;
    double ppo_snr = 0.0;
    double ppo_peak_photon = 0.0;
    double ppo_max_gz = 0.0;
    bool sta_feasible = false;
    bool ppo_feasible = false;
    std::optional<SplinePulse> ppo_pulse;
};

struct SweepGrid {
    std::vector<double> g_max;
    std::vector<double> n_max;
    std::vector<SweepCell> cells;  ///< row-major: n_max outer, g_max inner
};

SweepGrid run_scalability(const Config& config, Exec exec = Exec::parallel);

struct RobustnessSurface {
    std::vector<double> timing;     ///< |dt| / t_f bounds
    std::vector<double> amplitude;  ///< |dA| / A bounds
    std::vector<std::vector<double>> sta;  ///< [timing][amplitude]
    std::vector<std::vector<double>> ppo;
};

/// Worst-case surfaces for two fixed waveforms. Each cell takes the minimum
/// over its own sampled box and the cells it contains.
RobustnessSurface run_robustness(const Config& config, std::span<const double> sta_gc,
                                 std::span<const double> ppo_gc, const SystemParams& params,
                                 Exec exec = Exec::parallel);

/// Default thresholds: 1.0x to 1.4x the seed SNR in steps of 0.1, when config leaves them empty.
std::vector<double> bench_thresholds(const Config& config, const Setup& setup);

std::vector<TargetRow> run_seeding_bench(const Config& config, const Setup& setup,
                                         Exec exec = Exec::parallel);

}  // namespace lqro
