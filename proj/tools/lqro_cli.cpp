#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "lqro/artifacts.hpp"
#include "lqro/config.hpp"
#include "lqro/errors.hpp"
#include "lqro/experiments.hpp"

namespace fs = std::filesystem;
using namespace lqro;

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out = "out";
    int threads = 0;
};

Config resolve(const Common& c) {
    Config cfg = c.config_path.empty() ? parse_config("") : load_config(c.config_path);
    for (const auto& kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        cfg = with_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::map<std::string, std::string> derived_of(const Setup& s) {
    return {
        {"n_seed", num(s.seed.n_seed)},
        {"scale_s", num(s.seed.scale_s)},
        {"gz0_over_2pi_hz", num(s.seed.gz0 / kTwoPi)},
        {"s_eff", num(s.params.s_eff)},
        {"seed_snr_poly", num(s.fit.snr_poly)},
        {"seed_snr_fit", num(s.fit.snr_fit)},
        {"seed_fit_residual_rms_rel", num(s.fit.residual_rms / s.fit.peak_amplitude)},
        {"a_seed_rad", num(s.weights.a_seed)},
        {"rate_convention", "config rates are f = omega/2pi; kappa, omega_r, g_z0, g_max used as angular rates"},
        {"amplitude_convention", "gz0_base = 2pi * gz0_base_over_2pi_hz rad/s"},
    };
}

// Manifest goes out before any result; it is rewritten once with the
// artifact list when the command finishes.
struct Run {
    fs::path dir;
    RunManifest manifest;

    Run(const std::string& command, const Common& c, const Config& cfg, const Setup& s) : dir(c.out) {
        fs::create_directories(dir);
        manifest = {command, cfg, derived_of(s), {}, version_string(), utc_timestamp()};
        write_manifest(dir / "manifest.json", manifest);
    }
    void finish(std::vector<std::string> artifacts) {
        manifest.artifacts = std::move(artifacts);
        write_manifest(dir / "manifest.json", manifest);
    }
};

void print_breakdown(const Evaluation& e) {
    const auto& b = e.breakdown;
    std::printf("snr_tf       %.6f\n", b.snr_tf);
    std::printf("peak_photon  %.6f\n", b.peak_photon);
    std::printf("max_gz/2pi   %.6g Hz\n", b.max_abs_gz / kTwoPi);
    std::printf("r_snr        %.9g\n", b.r_snr);
    std::printf("p_n          %.9g\n", b.p_n);
    std::printf("p_area       %.9g\n", b.p_area);
    std::printf("p_g          %.9g\n", b.p_g);
    std::printf("total        %.9g\n", b.total);
    std::printf("feasible     %s\n", e.feasible ? "yes" : "no");
}

ProtocolSeries series_of(const RewardModel& model, const SplinePulse& pulse) {
    ProtocolSeries s;
    s.gc = model.gc(pulse.coeffs());
    s.gz = model.gz(pulse.coeffs());
    s.traj = propagate(s.gc, model.params());
    return s;
}

SplinePulse trained_or_loaded(const std::string& pulse_path, const Config& cfg, const Setup& s) {
    if (!pulse_path.empty()) return load_pulse(pulse_path);
    const RewardModel model(s.basis, s.params, s.weights);
    PpoConfig p = cfg.ppo;
    p.seed_mode = SeedMode::seeded;
    return train(p, model, s.fit.pulse, cfg.rng_seed).best;
}

int cmd_calibrate(const Common& c) {
    const Config cfg = resolve(c);
    const Setup s = prepare(cfg);
    Run run("calibrate-seed", c, cfg, s);
    std::printf("N_seed       %.4f\n", s.seed.n_seed);
    std::printf("s            %.6f\n", s.seed.scale_s);
    std::printf("g_z0/2pi     %.6f MHz\n", s.seed.gz0 / kTwoPi / 1e6);
    std::printf("S_eff        %.6g\n", s.params.s_eff);
    std::printf("seed SNR     %.6f (spline fit %.6f, residual %.3g of peak)\n", s.fit.snr_poly, s.fit.snr_fit,
                s.fit.residual_rms / s.fit.peak_amplitude);
    save_pulse(run.dir / "pulse_seed_fit.json", s.fit.pulse);
    run.finish({(run.dir / "pulse_seed_fit.json").string()});
    return 0;
}

int cmd_train(const Common& c, int max_iter, const std::string& mode) {
    Config cfg = resolve(c);
    if (max_iter >= 0) cfg = with_override(cfg, "ppo.max_iterations", std::to_string(max_iter));
    if (!mode.empty()) cfg = with_override(cfg, "ppo.seed_mode", mode);
    const Setup s = prepare(cfg);
    Run run("train", c, cfg, s);
    std::vector<std::string> files;
    if (cfg.ppo.seed_mode == SeedMode::seeded) {
        const auto r = run_comparison(cfg);
        files = write_comparison(run.dir, r);
        std::printf("seed SNR %.6f  ppo SNR %.6f  ratio %.4f  ppo peak N %.4f  iterations %zu\n",
                    r.seed.traj.snr_tf(), r.ppo.traj.snr_tf(), r.ppo.traj.snr_tf() / r.seed.traj.snr_tf(),
                    r.ppo.traj.peak_photon, r.training.trace.records.size());
    } else {
        const RewardModel model(s.basis, s.params, s.weights);
        const auto tr = train(cfg.ppo, model, s.fit.pulse, cfg.rng_seed);
        files.push_back(write_trace(run.dir / "trace.csv", tr.trace).string());
        files.push_back(write_protocol_series(run.dir / "timeseries_ppo.csv", series_of(model, tr.best)).string());
        save_pulse(run.dir / "pulse_ppo.json", tr.best);
        files.push_back((run.dir / "pulse_ppo.json").string());
        std::printf("ppo SNR %.6f  peak N %.4f  iterations %zu\n", tr.best_eval.breakdown.snr_tf,
                    tr.best_eval.breakdown.peak_photon, tr.trace.records.size());
    }
    run.finish(files);
    return 0;
}

int cmd_evaluate(const Common& c, const std::string& pulse_path) {
    const Config cfg = resolve(c);
    const Setup s = prepare(cfg);
    Run run("evaluate", c, cfg, s);
    const SplinePulse pulse = load_pulse(pulse_path);
    if (!pulse.is_clamped()) throw DomainError(pulse_path + ": boundary coefficients are not zero");
    const RewardModel model(pulse.basis(), s.params, s.weights);
    print_breakdown(evaluate_pulse(model, pulse.coeffs(), cfg.ppo.feasibility_tol));
    const auto f = write_protocol_series(run.dir / "timeseries_evaluated.csv", series_of(model, pulse));
    run.finish({f.string()});
    return 0;
}

int cmd_sweep_scalability(const Common& c) {
    const Config cfg = resolve(c);
    const Setup s = prepare(cfg);
    Run run("sweep-scalability", c, cfg, s);
    const auto g = run_scalability(cfg);
    for (const auto& cell : g.cells)
        std::printf("g_max/2pi %8.3f MHz  N_max %5.1f  %-6s  STA %.5f  PPO %.5f  %s\n", cell.g_max / kTwoPi / 1e6,
                    cell.n_max, cell.photon_binding ? "photon" : "g_max", cell.sta_snr, cell.ppo_snr,
                    cell.ppo_feasible ? "feasible" : "INFEASIBLE");
    run.finish({write_sweep(run.dir / "sweep.csv", g).string()});
    return 0;
}

int cmd_sweep_robustness(const Common& c, const std::string& pulse_path) {
    const Config cfg = resolve(c);
    const Setup s = prepare(cfg);
    Run run("sweep-robustness", c, cfg, s);
    const SplinePulse ppo = trained_or_loaded(pulse_path, cfg, s);
    const RewardModel model(ppo.basis(), s.params, s.weights);
    const auto sta_gc = seed_gc(s.seed, s.params, UniformGrid(s.params).times());
    const auto surf = run_robustness(cfg, sta_gc, model.gc(ppo.coeffs()), s.params);
    for (std::size_t i = 0; i < surf.timing.size(); ++i)
        for (std::size_t j = 0; j < surf.amplitude.size(); ++j)
            std::printf("|dt|/t_f %.4f  |dA|/A %.4f  STA %.5f  PPO %.5f\n", surf.timing[i], surf.amplitude[j],
                        surf.sta[i][j], surf.ppo[i][j]);
    run.finish({write_robustness(run.dir / "robustness.csv", surf).string()});
    return 0;
}

int cmd_bench(const Common& c) {
    const Config cfg = resolve(c);
    const Setup s = prepare(cfg);
    Run run("bench-seeding", c, cfg, s);
    const auto rows = run_seeding_bench(cfg, s);
    std::printf("%-10s %-16s %-16s\n", "threshold", "seeded", "unseeded");
    for (const auto& r : rows) {
        auto cell = [](const std::vector<std::optional<int>>& v) {
            const auto m = TargetRow::mean_attained(v);
            char buf[64];
            if (m)
                std::snprintf(buf, sizeof buf, "%.1f (%d/%zu)", *m, TargetRow::count_attained(v), v.size());
            else
                std::snprintf(buf, sizeof buf, "- (0/%zu)", v.size());
            return std::string(buf);
        };
        std::printf("%-10.4f %-16s %-16s\n", r.threshold, cell(r.seeded).c_str(), cell(r.unseeded).c_str());
    }
    run.finish({write_bench(run.dir / "bench.csv", rows).string()});
    return 0;
}

int cmd_histogram(const Common& c, const std::string& pulse_path) {
    const Config cfg = resolve(c);
    const Setup s = prepare(cfg);
    Run run("histogram", c, cfg, s);
    const SplinePulse ppo = trained_or_loaded(pulse_path, cfg, s);
    const RewardModel model(ppo.basis(), s.params, s.weights);
    const auto seed_traj = propagate(seed_gc(s.seed, s.params, UniformGrid(s.params).times()), s.params);
    const auto ppo_traj = propagate(model.gc(ppo.coeffs()), s.params);
    const auto hs = sample_homodyne(seed_traj, s.params, cfg.histogram_shots, derive_seed(cfg.rng_seed, 101));
    const auto hp = sample_homodyne(ppo_traj, s.params, cfg.histogram_shots, derive_seed(cfg.rng_seed, 102));
    std::printf("seed: separation/sigma %.5f  overlap error %.4g\n", hs.mean_sep / hs.sigma, hs.overlap_error());
    std::printf("ppo:  separation/sigma %.5f  overlap error %.4g\n", hp.mean_sep / hp.sigma, hp.overlap_error());
    run.finish({write_histograms(run.dir / "histogram.csv", hs, hp).string()});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spline pulse optimization for longitudinal qubit readout"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", common.config_path, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("-s,--set", common.overrides, "override one config key (key=value), repeatable");
        sub->add_option("-o,--out", common.out, "output directory")->capture_default_str();
    };

    int max_iter = -1;
    std::string mode, pulse_path;

    auto* cal = app.add_subcommand("calibrate-seed", "calibrate the seed amplitude and noise level");
    auto* trn = app.add_subcommand("train", "train PPO and write trace, best pulse and time series");
    trn->add_option("--max-iterations", max_iter, "override ppo.max_iterations");
    trn->add_option("--seed-mode", mode, "seeded or unseeded")->check(CLI::IsMember({"seeded", "unseeded"}));
    auto* ev = app.add_subcommand("evaluate", "score a stored pulse");
    ev->add_option("pulse", pulse_path, "pulse JSON file")->required()->check(CLI::ExistingFile);
    auto* scal = app.add_subcommand("sweep-scalability", "g_max x N_max sweep of STA and PPO");
    auto* rob = app.add_subcommand("sweep-robustness", "worst-case SNR surfaces under timing and amplitude errors");
    rob->add_option("--pulse", pulse_path, "PPO pulse (trained from the seed if omitted)")->check(CLI::ExistingFile);
    auto* bench = app.add_subcommand("bench-seeding", "iterations-to-target for seeded and unseeded starts");
    auto* hist = app.add_subcommand("histogram", "simulated integrated homodyne records");
    hist->add_option("--pulse", pulse_path, "PPO pulse (trained from the seed if omitted)")->check(CLI::ExistingFile);
    for (auto* sub : {cal, trn, ev, scal, rob, bench, hist}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*cal) return cmd_calibrate(common);
        if (*trn) return cmd_train(common, max_iter, mode);
        if (*ev) return cmd_evaluate(common, pulse_path);
        if (*scal) return cmd_sweep_scalability(common);
        if (*rob) return cmd_sweep_robustness(common, pulse_path);
        if (*bench) return cmd_bench(common);
        if (*hist) return cmd_histogram(common, pulse_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
