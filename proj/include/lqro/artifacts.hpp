#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lqro/experiments.hpp"

namespace lqro {

/// CSV writers for experiment outputs. Each returns the paths it wrote.

/// Columns t, gc, gz, photon, snr.
std::filesystem::path write_protocol_series(const std::filesystem::path& path,
                                            const ProtocolSeries& s);

/// Columns iteration, mean_total, mean_r_snr, mean_p_n, mean_p_area, mean_p_g,
/// eval_snr, eval_peak_photon, eval_feasible, best_snr, std_norm.
std::filesystem::path write_trace(const std::filesystem::path& path, const TrainingTrace& trace);

/// Columns shot, seed_g, seed_e, ppo_g, ppo_e.
std::filesystem::path write_histograms(const std::filesystem::path& path, const HomodyneSample& seed,
                                       const HomodyneSample& ppo);

/// Columns g_max, n_max, sta_snr, ppo_snr, feasible (g_max in Hz / 2 pi).
std::filesystem::path write_sweep(const std::filesystem::path& path, const SweepGrid& grid);

/// Columns timing_frac, amplitude_frac, sta_worst_snr, ppo_worst_snr.
std::filesystem::path write_robustness(const std::filesystem::path& path,
                                       const RobustnessSurface& surface);

/// Columns threshold, seeded (1/0), run, iterations (-1 when not attained).
std::filesystem::path write_bench(const std::filesystem::path& path, const std::vector<TargetRow>& rows);

/// Everything run_comparison produced: seed/ppo series, trace, histograms,
/// stored pulses.
std::vector<std::string> write_comparison(const std::filesystem::path& dir,
                                          const ComparisonResult& result);

}  // namespace lqro
