#pragma once

#include <span>
#include <vector>

#include "lqro/params.hpp"
#include "lqro/spline.hpp"

namespace lqro {

/// Amplitude bookkeeping for the polynomial STA seed
/// g_c(t) = -(70 pi g_z0 / (kappa t_f^7)) t^3 (t - t_f)^3.
struct SeedSpec {
    double gz0_base = kTwoPi * 21e6;  ///< rad/s
    double n_max = 50.0;
    double scale_s = 1.0;
    double gz0 = kTwoPi * 21e6;       ///< scale_s * gz0_base
    double n_seed = 0.0;              ///< peak photon number of the base seed
};

/// Seed waveform at amplitude `gz0` on arbitrary times.
std::vector<double> seed_gc(double gz0, const SystemParams& params, std::span<const double> times);
/// Physical coupling of the polynomial seed, g_c + g_c''/omega_r^2, in closed form.
std::vector<double> seed_gz(double gz0, const SystemParams& params, std::span<const double> times);

/// Seed waveform at spec.gz0.
std::vector<double> seed_gc(const SeedSpec& spec, const SystemParams& params,
                            std::span<const double> times);

/// Propagates the base seed, records its peak photon number and rescales the
/// amplitude so the peak equals n_max. Returns a new spec.
SeedSpec calibrate_seed(const SeedSpec& spec, const SystemParams& params);

/// Calibrated spec whose amplitude is additionally limited so that the
/// polynomial's max |g_z| stays at or below g_max.
SeedSpec calibrate_seed_capped(const SeedSpec& spec, const SystemParams& params, double g_max);

struct SeedFit {
    SplinePulse pulse;
    double residual_rms = 0.0;
    double peak_amplitude = 0.0;  ///< max |g_c| of the polynomial seed
    double snr_poly = 0.0;        ///< SNR(t_f) of the exact polynomial
    double snr_fit = 0.0;         ///< SNR(t_f) of the spline projection
    double area = 0.0;            ///< int |g_c| dt of the polynomial seed
};

/// Warm-start pulse: least-squares projection of the scaled seed onto the
/// clamped basis, with diagnostics.
SeedFit seed_coefficients(const SeedSpec& spec, const SplineBasis& basis, const SystemParams& params);

/// Noise density S_eff that puts the scaled seed's SNR(t_f) at `target`,
/// with every other parameter fixed.
double calibrate_noise(const SeedSpec& spec, const SystemParams& params, double target_snr);

}  // namespace lqro
