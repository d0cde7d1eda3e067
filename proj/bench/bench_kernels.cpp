#include <benchmark/benchmark.h>

#include <random>

#include "lqro/experiments.hpp"

using namespace lqro;

namespace {

const Setup& setup() {
    static const Setup s = prepare(parse_config(""));
    return s;
}

void batch_scoring(benchmark::State& state, Exec exec) {
    const auto& s = setup();
    const RewardModel model(s.basis, s.params, s.weights);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd(0.0, 0.3);
    std::vector<std::vector<double>> xs(static_cast<std::size_t>(state.range(0)));
    for (auto& x : xs) {
        x.resize(10);
        for (auto& v : x) v = nd(rng);
    }
    const double scale = kTwoPi * 100e6;
    for (auto _ : state) benchmark::DoNotOptimize(score_batch(model, scale, xs, exec));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void lattice(benchmark::State& state, Exec exec) {
    const auto& s = setup();
    const auto gc = seed_gc(s.seed, s.params, UniformGrid(s.params).times());
    const auto n = static_cast<int>(state.range(0));
    std::vector<double> shifts(n), gains(n);
    for (int i = 0; i < n; ++i) {
        shifts[i] = 0.1 * (2.0 * i / (n - 1) - 1.0);
        gains[i] = 0.1 * (2.0 * i / (n - 1) - 1.0);
    }
    for (auto _ : state) benchmark::DoNotOptimize(snr_lattice(gc, s.params, shifts, gains, exec));
    state.SetItemsProcessed(state.iterations() * n * n);
}

}  // namespace

BENCHMARK_CAPTURE(batch_scoring, serial, Exec::serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(batch_scoring, parallel, Exec::parallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(lattice, serial, Exec::serial)->Arg(5)->Arg(11)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(lattice, parallel, Exec::parallel)->Arg(5)->Arg(11)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
