#include "lqro/seed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lqro/cavity.hpp"
#include "lqro/errors.hpp"
#include "lqro/reward.hpp"

namespace lqro {

std::vector<double> seed_gc(double gz0, const SystemParams& p, std::span<const double> times) {
    const double tf = p.t_f;
    const double pref = -70.0 * std::numbers::pi * gz0 / (p.kappa * std::pow(tf, 7));
    std::vector<double> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        const double u = t - tf;
        out[i] = pref * (t * t * t) * (u * u * u);
    }
    return out;
}

std::vector<double> seed_gz(double gz0, const SystemParams& p, std::span<const double> times) {
    const double tf = p.t_f;
    const double pref = -70.0 * std::numbers::pi * gz0 / (p.kappa * std::pow(tf, 7));
    const double inv_w2 = 1.0 / (p.omega_r * p.omega_r);
    std::vector<double> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        const double u = t - tf;
        // d2/dt2 of t^3 u^3 with u = t - t_f
        const double d2 = 6.0 * t * u * (u * u + 3.0 * t * u + t * t);
        out[i] = pref * ((t * t * t) * (u * u * u) + d2 * inv_w2);
    }
    return out;
}

std::vector<double> seed_gc(const SeedSpec& spec, const SystemParams& p,
                            std::span<const double> times) {
    return seed_gc(spec.gz0, p, times);
}

SeedSpec calibrate_seed(const SeedSpec& spec, const SystemParams& p) {
    const UniformGrid grid(p);
    const auto base = seed_gc(spec.gz0_base, p, grid.times());
    const double n_seed = propagate(base, p).peak_photon;
    if (!(n_seed > 0.0)) throw CalibrationError("seed calibration: base seed has zero peak photon number");
    SeedSpec out = spec;
    out.n_seed = n_seed;
    out.scale_s = std::sqrt(spec.n_max / n_seed);
    out.gz0 = out.scale_s * spec.gz0_base;
    return out;
}

SeedSpec calibrate_seed_capped(const SeedSpec& spec, const SystemParams& p, double g_max) {
    SeedSpec out = calibrate_seed(spec, p);
    // g_z is linear in the amplitude, so the coupling-limited scale is exact.
    const UniformGrid grid(p);
    double peak_gz = 0.0;
    for (double g : seed_gz(spec.gz0_base, p, grid.times())) peak_gz = std::max(peak_gz, std::abs(g));
    const double s_cap = g_max / peak_gz;
    if (s_cap < out.scale_s) {
        out.scale_s = s_cap;
        out.gz0 = s_cap * spec.gz0_base;
    }
    return out;
}

SeedFit seed_coefficients(const SeedSpec& spec, const SplineBasis& basis, const SystemParams& p) {
    const UniformGrid grid(p);
    const auto target = seed_gc(spec, p, grid.times());
    auto fit = fit_spline_to_function(grid.times(), target, basis);

    SeedFit out{fit.pulse, fit.residual_rms};
    for (double g : target) out.peak_amplitude = std::max(out.peak_amplitude, std::abs(g));
    out.snr_poly = final_snr(target, p);
    out.snr_fit = final_snr(eval_gc(fit.pulse, grid.times()), p);
    std::vector<double> a(target.size());
    std::transform(target.begin(), target.end(), a.begin(), [](double x) { return std::abs(x); });
    out.area = trapezoid(a, grid.dt());
    return out;
}

double calibrate_noise(const SeedSpec& spec, const SystemParams& p, double target_snr) {
    if (!(target_snr > 0.0)) throw CalibrationError("noise calibration needs a positive target SNR");
    const UniformGrid grid(p);
    const double snr = final_snr(seed_gc(spec, p, grid.times()), p);
    if (!(snr > 0.0)) throw CalibrationError("noise calibration: seed has zero SNR");
    // SNR scales as S_eff^{-1/2}.
    const double ratio = snr / target_snr;
    return p.s_eff * ratio * ratio;
}

}  // namespace lqro
