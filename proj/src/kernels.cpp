#include "lqro/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lqro/experiments.hpp"

namespace lqro {
namespace {

RewardBreakdown score_one(const RewardModel& model, double scale, const std::vector<double>& x) {
    std::vector<double> c(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) c[k] = scale * x[k];
    return model.evaluate_free(c);
}

}  // namespace

int parallel_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::vector<RewardBreakdown> score_batch(const RewardModel& model, double scale,
                                         std::span<const std::vector<double>> samples, Exec exec) {
    const auto n = static_cast<std::ptrdiff_t>(samples.size());
    std::vector<RewardBreakdown> out(samples.size());
    if (exec == Exec::serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = score_one(model, scale, samples[i]);
        return out;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = score_one(model, scale, samples[i]);
    return out;
}

std::vector<double> snr_lattice(std::span<const double> gc, const SystemParams& params,
                                std::span<const double> shifts, std::span<const double> gains,
                                Exec exec) {
    const UniformGrid grid(params);
    const auto nd = static_cast<std::ptrdiff_t>(shifts.size());
    const auto na = static_cast<std::ptrdiff_t>(gains.size());
    std::vector<double> out(static_cast<std::size_t>(nd * na));
    auto cell = [&](std::ptrdiff_t idx) {
        const auto i = idx / na, j = idx % na;
        out[static_cast<std::size_t>(idx)] =
            final_snr(perturb_pulse(gc, shifts[static_cast<std::size_t>(i)], gains[static_cast<std::size_t>(j)], grid), params);
    };
    if (exec == Exec::serial) {
        for (std::ptrdiff_t idx = 0; idx < nd * na; ++idx) cell(idx);
        return out;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t idx = 0; idx < nd * na; ++idx) cell(idx);
    return out;
}

}  // namespace lqro
