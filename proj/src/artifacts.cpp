#include "lqro/artifacts.hpp"

#include <algorithm>

namespace lqro {

std::filesystem::path write_protocol_series(const std::filesystem::path& path,
                                            const ProtocolSeries& s) {
    std::vector<std::vector<double>> rows(s.gc.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i] = {s.traj.grid[i], s.gc[i], s.gz[i], s.traj.photon[i], s.traj.snr[i]};
    emit_timeseries(path, {"t", "gc", "gz", "photon", "snr"}, rows);
    return path;
}

std::filesystem::path write_trace(const std::filesystem::path& path, const TrainingTrace& trace) {
    std::vector<std::vector<double>> rows;
    rows.reserve(trace.records.size());
    for (const auto& r : trace.records) {
        rows.push_back({static_cast<double>(r.iteration), r.mean_total, r.mean_r_snr, r.mean_p_n,
                        r.mean_p_area, r.mean_p_g, r.eval_snr, r.eval_peak_photon,
                        r.eval_feasible ? 1.0 : 0.0, r.best_snr, r.std_norm});
    }
    emit_timeseries(path,
                    {"iteration", "mean_total", "mean_r_snr", "mean_p_n", "mean_p_area", "mean_p_g",
                     "eval_snr", "eval_peak_photon", "eval_feasible", "best_snr", "std_norm"},
                    rows);
    return path;
}

std::filesystem::path write_histograms(const std::filesystem::path& path, const HomodyneSample& seed,
                                       const HomodyneSample& ppo) {
    const std::size_t n = std::min(seed.record_g.size(), ppo.record_g.size());
    std::vector<std::vector<double>> rows(n);
    for (std::size_t i = 0; i < n; ++i)
        rows[i] = {static_cast<double>(i), seed.record_g[i], seed.record_e[i], ppo.record_g[i], ppo.record_e[i]};
    emit_timeseries(path, {"shot", "seed_g", "seed_e", "ppo_g", "ppo_e"}, rows);
    return path;
}

std::filesystem::path write_sweep(const std::filesystem::path& path, const SweepGrid& grid) {
    std::vector<std::vector<double>> rows;
    for (const auto& c : grid.cells) {
        rows.push_back({c.g_max / kTwoPi, c.n_max, c.sta_snr, c.ppo_snr,
                        (c.sta_feasible && c.ppo_feasible) ? 1.0 : 0.0});
    }
    emit_timeseries(path, {"g_max", "n_max", "sta_snr", "ppo_snr", "feasible"}, rows);
    return path;
}

std::filesystem::path write_robustness(const std::filesystem::path& path,
                                       const RobustnessSurface& s) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < s.timing.size(); ++i)
        for (std::size_t j = 0; j < s.amplitude.size(); ++j)
            rows.push_back({s.timing[i], s.amplitude[j], s.sta[i][j], s.ppo[i][j]});
    emit_timeseries(path, {"timing_frac", "amplitude_frac", "sta_worst_snr", "ppo_worst_snr"}, rows);
    return path;
}

std::filesystem::path write_bench(const std::filesystem::path& path, const std::vector<TargetRow>& rows) {
    std::vector<std::vector<double>> out;
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.seeded.size(); ++k)
            out.push_back({r.threshold, 1.0, static_cast<double>(k), r.seeded[k] ? static_cast<double>(*r.seeded[k]) : -1.0});
        for (std::size_t k = 0; k < r.unseeded.size(); ++k)
            out.push_back({r.threshold, 0.0, static_cast<double>(k), r.unseeded[k] ? static_cast<double>(*r.unseeded[k]) : -1.0});
    }
    emit_timeseries(path, {"threshold", "seeded", "run", "iterations"}, out);
    return path;
}

std::vector<std::string> write_comparison(const std::filesystem::path& dir,
                                          const ComparisonResult& r) {
    std::vector<std::string> paths;
    paths.push_back(write_protocol_series(dir / "timeseries_seed.csv", r.seed).string());
    paths.push_back(write_protocol_series(dir / "timeseries_ppo.csv", r.ppo).string());
    paths.push_back(write_trace(dir / "trace.csv", r.training.trace).string());
    paths.push_back(write_histograms(dir / "histogram.csv", r.hist_seed, r.hist_ppo).string());
    save_pulse(dir / "pulse_seed_fit.json", r.setup.fit.pulse);
    paths.push_back((dir / "pulse_seed_fit.json").string());
    save_pulse(dir / "pulse_ppo.json", r.training.best);
    paths.push_back((dir / "pulse_ppo.json").string());
    return paths;
}

}  // namespace lqro
