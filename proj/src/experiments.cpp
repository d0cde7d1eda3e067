#include "lqro/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lqro/errors.hpp"

namespace lqro {

std::vector<double> perturb_pulse(std::span<const double> gc, double delta_t, double delta_a,
                                  const UniformGrid& grid) {
    if (!(std::abs(delta_t) < 1.0)) throw DomainError("timing error must satisfy |delta_t| < 1");
    if (static_cast<int>(gc.size()) != grid.size()) throw DomainError("perturb_pulse: length mismatch");
    const double gain = 1.0 + delta_a;
    std::vector<double> out(gc.size(), 0.0);
    if (delta_t == 0.0) {
        for (std::size_t i = 0; i < gc.size(); ++i) out[i] = gain * gc[i];
        return out;
    }
    const double shift = delta_t * grid.t_f() / grid.dt();  // in grid steps
    const auto last = static_cast<double>(gc.size() - 1);
    for (std::size_t i = 0; i < gc.size(); ++i) {
        const double u = static_cast<double>(i) - shift;
        if (u < 0.0 || u > last) continue;
        const auto k = std::min(static_cast<std::size_t>(u), gc.size() - 2);
        const double w = u - static_cast<double>(k);
        out[i] = gain * ((1.0 - w) * gc[k] + w * gc[k + 1]);
    }
    return out;
}

namespace {

std::vector<double> symmetric_points(double bound, int resolution) {
    std::vector<double> v(static_cast<std::size_t>(resolution));
    for (int i = 0; i < resolution; ++i)
        v[static_cast<std::size_t>(i)] = bound * (2.0 * i / (resolution - 1) - 1.0);
    return v;
}

std::vector<double> abs_values(const std::vector<double>& v) {
    std::vector<double> a(v.size());
    std::transform(v.begin(), v.end(), a.begin(), [](double x) { return std::abs(x); });
    return a;
}

}  // namespace

double worst_case_snr(std::span<const double> gc, double bound_t, double bound_a,
                      const SystemParams& params, int resolution, Exec exec) {
    if (resolution < 2) throw DomainError("worst_case_snr needs resolution >= 2");
    const auto shifts = symmetric_points(std::abs(bound_t), resolution);
    const auto gains = symmetric_points(std::abs(bound_a), resolution);
    const auto snr = snr_lattice(gc, params, shifts, gains, exec);
    return *std::min_element(snr.begin(), snr.end());
}

Setup prepare(const Config& config) {
    SystemParams params = config.params;
    params.validate();
    SeedSpec spec;
    spec.gz0_base = config.gz0_base;
    spec.n_max = params.n_max;
    if (params.g_max)
        spec = calibrate_seed_capped(spec, params, *params.g_max);
    else
        spec = calibrate_seed(spec, params);
    if (config.s_eff_calibrated) {
        // The noise reference is always the photon-limited seed, so SNRs are
        // comparable across caps.
        SystemParams ref = params;
        ref.g_max.reset();
        const SeedSpec ref_spec = calibrate_seed(spec, ref);
        params.s_eff = calibrate_noise(ref_spec, ref, config.seed_snr_target);
    }
    SplineBasis basis(config.n_basis, params.t_f);
    SeedFit fit = seed_coefficients(spec, basis, params);
    RewardWeights w = config.weights;
    w.a_seed = fit.area;
    return {params, w, spec, std::move(fit), std::move(basis)};
}

namespace {

ProtocolSeries series(const RewardModel& model, const SplinePulse& pulse) {
    ProtocolSeries s;
    s.gc = model.gc(pulse.coeffs());
    s.gz = model.gz(pulse.coeffs());
    s.traj = propagate(s.gc, model.params());
    return s;
}

}  // namespace

double fraction_above(const Trajectory& traj, double level) {
    if (traj.photon.size() < 2) return 0.0;
    std::vector<double> ind(traj.photon.size());
    for (std::size_t i = 0; i < ind.size(); ++i) ind[i] = traj.photon[i] >= level ? 1.0 : 0.0;
    const double dt = traj.grid[1] - traj.grid[0];
    return trapezoid(ind, dt) / traj.grid.back();
}

ComparisonResult run_comparison(const Config& config, Exec exec) {
    Setup setup = prepare(config);
    const RewardModel model(setup.basis, setup.params, setup.weights);
    PpoConfig ppo = config.ppo;
    ppo.seed_mode = SeedMode::seeded;
    TrainResult tr = train(ppo, model, setup.fit.pulse, config.rng_seed, exec);

    const UniformGrid grid(setup.params);
    ProtocolSeries seed;
    seed.gc = seed_gc(setup.seed, setup.params, grid.times());
    seed.gz = seed_gz(setup.seed.gz0, setup.params, grid.times());
    seed.traj = propagate(seed.gc, setup.params);
    ProtocolSeries best = series(model, tr.best);

    const auto shots = config.histogram_shots;
    HomodyneSample hs = sample_homodyne(seed.traj, setup.params, shots, derive_seed(config.rng_seed, 101));
    HomodyneSample hp = sample_homodyne(best.traj, setup.params, shots, derive_seed(config.rng_seed, 102));
    return {std::move(setup), std::move(seed), std::move(best), std::move(tr), std::move(hs), std::move(hp)};
}

SweepGrid run_scalability(const Config& config, Exec exec) {
    if (config.sweep_g_max.empty() || config.sweep_n_max.empty())
        throw DomainError("scalability sweep needs nonempty g_max and n_max axes");
    SweepGrid out{config.sweep_g_max, config.sweep_n_max, {}};
    // One noise level for the whole grid, set at the base caps.
    const double s_eff = prepare(config).params.s_eff;
    std::uint64_t cell_id = 0;
    for (double n_max : config.sweep_n_max) {
        for (double g_max : config.sweep_g_max) {
            Config c = config;
            c.params.n_max = n_max;
            c.params.g_max = g_max;
            c.params.s_eff = s_eff;
            c.s_eff_calibrated = false;
            const Setup s = prepare(c);
            const SeedSpec photon_only = calibrate_seed(s.seed, [&] {
                SystemParams q = s.params;
                q.g_max.reset();
                return q;
            }());

            SweepCell cell;
            cell.g_max = g_max;
            cell.n_max = n_max;
            cell.seed_scale = s.seed.scale_s;
            cell.photon_binding = s.seed.scale_s >= photon_only.scale_s;
            const UniformGrid grid(s.params);
            const auto sta_gc = seed_gc(s.seed, s.params, grid.times());
            const auto sta_gz = seed_gz(s.seed.gz0, s.params, grid.times());
            const Trajectory sta = propagate(sta_gc, s.params);
            cell.sta_snr = sta.snr_tf();
            const double tol = c.ppo.feasibility_tol;
            double sta_gz_max = 0.0;
            for (double g : sta_gz) sta_gz_max = std::max(sta_gz_max, std::abs(g));
            cell.sta_feasible = sta.peak_photon <= n_max * (1.0 + tol) && sta_gz_max <= g_max * (1.0 + tol);

            if (!(s.seed.scale_s > 0.0)) {
                out.cells.push_back(std::move(cell));
                continue;
            }
            const RewardModel model(s.basis, s.params, s.weights);
            PpoConfig ppo = c.ppo;
            ppo.seed_mode = SeedMode::seeded;
            const TrainResult tr = train(ppo, model, s.fit.pulse, derive_seed(config.rng_seed, 1000 + cell_id), exec);
            cell.ppo_snr = tr.best_eval.breakdown.snr_tf;
            cell.ppo_peak_photon = tr.best_eval.breakdown.peak_photon;
            cell.ppo_max_gz = tr.best_eval.breakdown.max_abs_gz;
            cell.ppo_feasible = tr.best_eval.feasible;
            cell.ppo_pulse = tr.best;
            out.cells.push_back(std::move(cell));
            ++cell_id;
        }
    }
    return out;
}

RobustnessSurface run_robustness(const Config& config, std::span<const double> sta_gc,
                                 std::span<const double> ppo_gc, const SystemParams& params,
                                 Exec exec) {
    RobustnessSurface out{abs_values(config.robust_timing), abs_values(config.robust_amplitude), {}, {}};
    std::sort(out.timing.begin(), out.timing.end());
    std::sort(out.amplitude.begin(), out.amplitude.end());
    const std::size_t nt = out.timing.size(), na = out.amplitude.size();

    auto surface = [&](std::span<const double> gc) {
        std::vector<std::vector<double>> s(nt, std::vector<double>(na));
        for (std::size_t i = 0; i < nt; ++i) {
            for (std::size_t j = 0; j < na; ++j) {
                double v = worst_case_snr(gc, out.timing[i], out.amplitude[j], params,
                                          config.robust_resolution, exec);
                if (i > 0) v = std::min(v, s[i - 1][j]);
                if (j > 0) v = std::min(v, s[i][j - 1]);
                s[i][j] = v;
            }
        }
        return s;
    };
    out.sta = surface(sta_gc);
    out.ppo = surface(ppo_gc);
    return out;
}

std::vector<double> bench_thresholds(const Config& config, const Setup& setup) {
    if (!config.bench_targets.empty()) return config.bench_targets;
    const double s = setup.fit.snr_poly;
    return {1.0 * s, 1.1 * s, 1.2 * s, 1.3 * s, 1.4 * s};
}

std::vector<TargetRow> run_seeding_bench(const Config& config, const Setup& setup, Exec exec) {
    const RewardModel model(setup.basis, setup.params, setup.weights);
    PpoConfig ppo = config.ppo;
    ppo.max_iterations = config.bench_iterations;
    const auto th = bench_thresholds(config, setup);
    return iterations_to_target(ppo, model, setup.fit.pulse, th, config.bench_runs,
                                derive_seed(config.rng_seed, 7), exec);
}

}  // namespace lqro
