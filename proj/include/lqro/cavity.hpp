#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "lqro/params.hpp"

namespace lqro {

/// Linearized cavity response to a longitudinal drive on the uniform grid.
///
/// Only the excited-state amplitude is stored; the ground-state amplitude is
/// its negation (see alpha_g()).
struct Trajectory {
    std::vector<double> grid;
    std::vector<std::complex<double>> alpha_e;
    std::vector<double> photon;     ///< N(t) = |alpha_e|^2
    std::vector<double> d_out;      ///< output pointer separation 2 sqrt(kappa) |alpha_e|
    std::vector<double> signal;     ///< A(t) = int_0^t d_out, nondecreasing
    std::vector<double> snr;        ///< cumulative SNR(t), SNR(0) = 0
    double peak_photon = 0.0;

    [[nodiscard]] std::size_t size() const { return grid.size(); }
    [[nodiscard]] std::complex<double> alpha_g(std::size_t i) const { return -alpha_e[i]; }
    [[nodiscard]] double snr_tf() const { return snr.back(); }
};

/// Conditional amplitude alpha_e(t) = -i e^{-kappa t/2} int_0^t g_c e^{kappa tau/2},
/// by cumulative trapezoidal quadrature, followed by photon number,
/// pointer separation and SNR. `gc` must have params.n_grid samples.
Trajectory propagate(std::span<const double> gc, const SystemParams& params);

/// Classical RK4 integration of d alpha/dt = -(kappa/2) alpha - i g_c(t) on
/// the same grid, with g_c linearly interpolated at half steps. Test oracle
/// for propagate().
Trajectory ode_oracle(std::span<const double> gc, const SystemParams& params);

/// SNR(t) = sqrt(eta kappa) int_0^t d_out / sqrt(S_eff t), SNR(0) = 0.
std::vector<double> snr_series(const Trajectory& traj, const SystemParams& params);

/// Only SNR(t_f), without materialising the trajectory. Same quadrature as
/// propagate().
double final_snr(std::span<const double> gc, const SystemParams& params);

struct HomodyneSample {
    std::vector<double> record_g;
    std::vector<double> record_e;
    int shots = 0;
    double mean_sep = 0.0;  ///< separation of the two distribution centres
    double sigma = 0.0;     ///< common standard deviation sqrt(S_eff t_f)

    /// Gaussian overlap error 1/2 erfc(mean_sep / (2 sqrt(2) sigma)).
    [[nodiscard]] double overlap_error() const;
};

/// Integrated homodyne records I_m for both qubit states: Gaussian with
/// means -/+ mean_sep/2 and variance S_eff t_f. Deterministic in `seed`.
HomodyneSample sample_homodyne(const Trajectory& traj, const SystemParams& params, int shots,
                               std::uint64_t seed);

}  // namespace lqro
