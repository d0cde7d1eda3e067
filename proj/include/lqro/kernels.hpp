#pragma once

#include <span>
#include <vector>

#include "lqro/reward.hpp"

namespace lqro {

enum class Exec { serial, parallel };

/// Scores a batch of free-coefficient vectors, each given in units of
/// `scale` (rad/s). The serial path is the reference; the parallel path
/// splits samples over OpenMP threads and returns identical results.
std::vector<RewardBreakdown> score_batch(const RewardModel& model, double scale,
                                         std::span<const std::vector<double>> samples,
                                         Exec exec = Exec::parallel);

/// SNR(t_f) of (1 + a) g_c(t - d t_f) for every (d, a) in the Cartesian
/// product of `shifts` and `gains`, row-major in shifts.
std::vector<double> snr_lattice(std::span<const double> gc, const SystemParams& params,
                                std::span<const double> shifts, std::span<const double> gains,
                                Exec exec = Exec::parallel);

/// Number of OpenMP threads the parallel paths would use (1 without OpenMP).
int parallel_threads();

}  // namespace lqro
