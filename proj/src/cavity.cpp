#include "lqro/cavity.hpp"

#include <cmath>
#include <random>

#include "lqro/errors.hpp"

namespace lqro {
namespace {

using cd = std::complex<double>;

void check_length(std::span<const double> gc, const SystemParams& p) {
    if (static_cast<int>(gc.size()) != p.n_grid)
        throw DomainError("drive has " + std::to_string(gc.size()) + " samples, grid has " +
                          std::to_string(p.n_grid));
}

void finish(Trajectory& tr, const SystemParams& p) {
    const std::size_t n = tr.alpha_e.size();
    tr.photon.resize(n);
    tr.d_out.resize(n);
    const double two_sqrt_k = 2.0 * std::sqrt(p.kappa);
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tr.photon[i] = std::norm(tr.alpha_e[i]);
        tr.d_out[i] = two_sqrt_k * std::abs(tr.alpha_e[i]);
        peak = std::max(peak, tr.photon[i]);
    }
    tr.peak_photon = peak;

    const double dt = p.t_f / (p.n_grid - 1);
    tr.signal.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        tr.signal[i] = tr.signal[i - 1] + 0.5 * dt * (tr.d_out[i - 1] + tr.d_out[i]);
    tr.snr = snr_series(tr, p);
}

}  // namespace

Trajectory propagate(std::span<const double> gc, const SystemParams& p) {
    check_length(gc, p);
    const UniformGrid grid(p);
    const double dt = grid.dt();
    const double decay = std::exp(-0.5 * p.kappa * dt);

    // Trapezoid on g_c e^{kappa tau/2}, carried in the decaying frame so the
    // exponentials stay O(1): I_k = decay I_{k-1} + dt/2 (decay g_{k-1} + g_k).
    Trajectory tr;
    tr.grid = grid.times();
    tr.alpha_e.resize(gc.size());
    double integral = 0.0;
    tr.alpha_e[0] = 0.0;
    for (std::size_t i = 1; i < gc.size(); ++i) {
        integral = decay * integral + 0.5 * dt * (decay * gc[i - 1] + gc[i]);
        tr.alpha_e[i] = cd(0.0, -integral);
    }
    finish(tr, p);
    return tr;
}

Trajectory ode_oracle(std::span<const double> gc, const SystemParams& p) {
    check_length(gc, p);
    const UniformGrid grid(p);
    const double h = grid.dt();
    const double half_k = 0.5 * p.kappa;
    auto rhs = [&](cd a, double g) { return -half_k * a - cd(0.0, 1.0) * g; };

    Trajectory tr;
    tr.grid = grid.times();
    tr.alpha_e.resize(gc.size());
    cd a = 0.0;
    tr.alpha_e[0] = a;
    for (std::size_t i = 1; i < gc.size(); ++i) {
        const double g0 = gc[i - 1], g1 = gc[i], gm = 0.5 * (g0 + g1);
        const cd k1 = rhs(a, g0);
        const cd k2 = rhs(a + 0.5 * h * k1, gm);
        const cd k3 = rhs(a + 0.5 * h * k2, gm);
        const cd k4 = rhs(a + h * k3, g1);
        a += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        tr.alpha_e[i] = a;
    }
    finish(tr, p);
    return tr;
}

std::vector<double> snr_series(const Trajectory& tr, const SystemParams& p) {
    const std::size_t n = tr.signal.size();
    std::vector<double> snr(n, 0.0);
    const double pref = std::sqrt(p.eta * p.kappa / p.s_eff);
    for (std::size_t i = 1; i < n; ++i) snr[i] = pref * tr.signal[i] / std::sqrt(tr.grid[i]);
    return snr;
}

double final_snr(std::span<const double> gc, const SystemParams& p) {
    return propagate(gc, p).snr_tf();
}

double HomodyneSample::overlap_error() const {
    if (sigma <= 0.0) return 0.5;
    return 0.5 * std::erfc(mean_sep / (2.0 * std::sqrt(2.0) * sigma));
}

HomodyneSample sample_homodyne(const Trajectory& tr, const SystemParams& p, int shots,
                               std::uint64_t seed) {
    if (shots <= 0) throw DomainError("homodyne sampling needs shots >= 1");
    HomodyneSample out;
    out.shots = shots;
    out.mean_sep = std::sqrt(p.eta * p.kappa) * tr.signal.back();
    out.sigma = std::sqrt(p.s_eff * p.t_f);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, out.sigma);
    out.record_g.resize(static_cast<std::size_t>(shots));
    out.record_e.resize(static_cast<std::size_t>(shots));
    const double half = 0.5 * out.mean_sep;
    for (int i = 0; i < shots; ++i) {
        out.record_g[static_cast<std::size_t>(i)] = -half + noise(rng);
        out.record_e[static_cast<std::size_t>(i)] = half + noise(rng);
    }
    return out;
}

}  // namespace lqro
