#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "lqro/artifacts.hpp"
#include "lqro/errors.hpp"
#include "lqro/experiments.hpp"
#include "support.hpp"

using namespace lqro;
using namespace lqro::testing;

namespace {

const Setup& base_setup() {
    static const Setup s = prepare(parse_config(""));
    return s;
}

std::vector<double> seed_wave(const Setup& s) { return seed_gc(s.seed, s.params, UniformGrid(s.params).times()); }

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

}  // namespace

TEST_CASE("perturbations") {
    const auto& s = base_setup();
    const UniformGrid g(s.params);
    const auto gc = seed_wave(s);
    CHECK(perturb_pulse(gc, 0.0, 0.0, g) == gc);
    for (double x : perturb_pulse(gc, 0.03, -1.0, g)) CHECK(x == 0.0);
    CHECK(final_snr(perturb_pulse(gc, 0.0, -1.0, g), s.params) == 0.0);

    const double nominal = final_snr(gc, s.params);
    for (double a : {-0.1, 0.05, 0.3}) {
        CHECK(final_snr(perturb_pulse(gc, 0.0, a, g), s.params) == doctest::Approx((1 + a) * nominal).epsilon(1e-13));
    }
    // An exact whole-step shift moves samples without interpolation error.
    const auto shifted = perturb_pulse(gc, 10 * g.dt() / g.t_f(), 0.0, g);
    CHECK(shifted[9] == 0.0);
    CHECK(shifted[110] == doctest::Approx(gc[100]).epsilon(1e-9));
    CHECK_THROWS_AS(perturb_pulse(gc, 1.0, 0.0, g), DomainError);
}

TEST_CASE("worst-case SNR over an error box") {
    const auto& s = base_setup();
    const auto gc = seed_wave(s);
    const double nominal = final_snr(gc, s.params);
    CHECK(worst_case_snr(gc, 0.0, 0.0, s.params, 5) == nominal);
    CHECK(worst_case_snr(gc, 0.0, 0.08, s.params, 5) == doctest::Approx(0.92 * nominal).epsilon(1e-13));
    // Boxes sharing the lattice (3-point inside 5-point) are nested exactly.
    CHECK(worst_case_snr(gc, 0.05, 0.05, s.params, 3) >= worst_case_snr(gc, 0.1, 0.1, s.params, 5));
    CHECK(worst_case_snr(gc, 0.05, 0.05, s.params, 5, Exec::serial) ==
          worst_case_snr(gc, 0.05, 0.05, s.params, 5, Exec::parallel));
    CHECK_THROWS_AS(worst_case_snr(gc, 0.1, 0.1, s.params, 1), DomainError);
}

TEST_CASE("robustness surfaces are nested minima starting at the nominal SNR") {
    const auto& s = base_setup();
    const auto gc = seed_wave(s);
    auto other = gc;
    for (auto& x : other) x *= 1.2;
    Config c = parse_config("robust.timing_frac = 0, 0.05, 0.1\nrobust.amplitude_frac = 0, 0.1\n");
    const auto r = run_robustness(c, gc, other, s.params);
    REQUIRE(r.sta.size() == 3);
    REQUIRE(r.sta[0].size() == 2);
    CHECK(r.sta[0][0] == final_snr(gc, s.params));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            if (i > 0) CHECK(r.ppo[i][j] <= r.ppo[i - 1][j]);
            if (j > 0) CHECK(r.sta[i][j] <= r.sta[i][j - 1]);
            CHECK(r.ppo[i][j] == doctest::Approx(1.2 * r.sta[i][j]).epsilon(1e-12));
        }
}

TEST_CASE("prepare calibrates seed, noise and weights") {
    const auto& s = base_setup();
    CHECK(s.fit.snr_poly == doctest::Approx(3.8).epsilon(1e-12));
    CHECK(s.weights.a_seed == s.fit.area);
    CHECK(propagate(seed_wave(s), s.params).peak_photon == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("short comparison run produces consistent artifacts") {
    Config c = parse_config("ppo.max_iterations = 20\nppo.batch_size = 16\nhistogram.shots = 4000\n");
    const auto r = run_comparison(c);
    CHECK(r.seed.traj.peak_photon == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(r.ppo.traj.snr_tf() == r.training.best_eval.breakdown.snr_tf);
    CHECK(r.ppo.traj.snr == propagate(r.ppo.gc, r.setup.params).snr);
    CHECK(r.ppo.traj.snr_tf() >= r.setup.fit.snr_fit);

    // Histogram centres separate in proportion to the SNRs.
    const double sep_seed = mean(r.hist_seed.record_e) - mean(r.hist_seed.record_g);
    const double sep_ppo = mean(r.hist_ppo.record_e) - mean(r.hist_ppo.record_g);
    const double se = std::sqrt(2.0 / c.histogram_shots);  // in units of sigma
    CHECK(std::abs(sep_seed / r.hist_seed.sigma - r.seed.traj.snr_tf()) <= 5 * se);
    CHECK(std::abs(sep_ppo / r.hist_ppo.sigma - r.ppo.traj.snr_tf()) <= 5 * se);

    const auto dir = std::filesystem::temp_directory_path() / "lqro_test_comparison";
    std::filesystem::create_directories(dir);
    const auto files = write_comparison(dir, r);
    CHECK(files.size() == 6);
    std::ifstream ts(dir / "timeseries_ppo.csv");
    std::string header;
    std::getline(ts, header);
    CHECK(header == "t,gc,gz,photon,snr");
    const auto back = load_pulse(dir / "pulse_ppo.json");
    CHECK(back.coeffs() == r.training.best.coeffs());
    std::filesystem::remove_all(dir);
}

TEST_CASE("fraction of the window above a photon level") {
    Trajectory tr;
    tr.grid = {0.0, 1.0, 2.0, 3.0, 4.0};
    tr.photon = {0.0, 1.0, 1.0, 1.0, 0.0};
    CHECK(fraction_above(tr, 0.5) == doctest::Approx(0.75));  // trapezoid of the indicator
    CHECK(fraction_above(tr, 2.0) == 0.0);
    CHECK(fraction_above(tr, 0.0) == 1.0);
}

TEST_CASE("scalability sweep on a small grid") {
    Config c = parse_config(
        "sweep.g_max_over_2pi_hz = 40e6, 200e6\nsweep.n_max = 30, 50\nppo.max_iterations = 5\nppo.batch_size = 8\n");
    const auto g = run_scalability(c);
    REQUIRE(g.cells.size() == 4);
    // Row-major in n_max; the wide cap leaves the photon limit binding.
    CHECK_FALSE(g.cells[0].photon_binding);
    CHECK(g.cells[1].photon_binding);
    CHECK(g.cells[3].photon_binding);
    // One noise level for the whole grid: the photon-limited STA SNR grows as sqrt(N_max).
    CHECK(g.cells[3].sta_snr == doctest::Approx(3.8).epsilon(1e-9));
    CHECK(g.cells[1].sta_snr == doctest::Approx(3.8 * std::sqrt(30.0 / 50.0)).epsilon(1e-9));
    // A pure coupling cap fixes the same amplitude regardless of N_max.
    CHECK(g.cells[0].sta_snr == doctest::Approx(g.cells[2].sta_snr).epsilon(1e-12));
    for (const auto& cell : g.cells) {
        CHECK(cell.sta_feasible);
        CHECK(cell.ppo_snr >= cell.sta_snr * 0.99);
        CHECK(cell.ppo_pulse.has_value());
    }
    const auto again = run_scalability(c);
    for (std::size_t i = 0; i < 4; ++i) CHECK(again.cells[i].ppo_snr == g.cells[i].ppo_snr);
    CHECK_THROWS_AS(run_scalability(parse_config("sweep.n_max = \n")), DomainError);
}

TEST_CASE("default seeding thresholds span seed to 1.4x seed") {
    const auto& s = base_setup();
    const auto th = bench_thresholds(parse_config(""), s);
    REQUIRE(th.size() == 5);
    CHECK(th.front() == s.fit.snr_poly);
    CHECK(th.back() == doctest::Approx(1.4 * s.fit.snr_poly));
    CHECK(bench_thresholds(parse_config("bench.targets = 4, 5"), s) == std::vector<double>{4.0, 5.0});
}

TEST_CASE("tabular artifact schemas") {
    const auto dir = std::filesystem::temp_directory_path() / "lqro_test_schemas";
    std::filesystem::create_directories(dir);
    auto header = [](const std::filesystem::path& p) {
        std::ifstream in(p);
        std::string h;
        std::getline(in, h);
        return h;
    };
    SweepGrid g{{kTwoPi * 50e6}, {30.0}, {}};
    SweepCell cell;
    cell.g_max = kTwoPi * 50e6;
    cell.n_max = 30.0;
    cell.ppo_feasible = true;
    g.cells.push_back(cell);
    CHECK(header(write_sweep(dir / "sweep.csv", g)) == "g_max,n_max,sta_snr,ppo_snr,feasible");

    RobustnessSurface s{{0.0}, {0.0}, {{1.0}}, {{2.0}}};
    CHECK(header(write_robustness(dir / "rob.csv", s)) == "timing_frac,amplitude_frac,sta_worst_snr,ppo_worst_snr");

    TargetRow row;
    row.threshold = 4.0;
    row.seeded = {3, std::nullopt};
    row.unseeded = {5, 6};
    const auto bench = write_bench(dir / "bench.csv", {row});
    CHECK(header(bench) == "threshold,seeded,run,iterations");
    std::ifstream in(bench);
    std::string line;
    int n = 0, missing = 0;
    std::getline(in, line);
    while (std::getline(in, line)) {
        ++n;
        if (line.ends_with(",-1")) ++missing;
    }
    CHECK(n == 4);
    CHECK(missing == 1);
    std::filesystem::remove_all(dir);
}
