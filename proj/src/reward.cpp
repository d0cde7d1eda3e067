#include "lqro/reward.hpp"

#include <algorithm>
#include <cmath>

#include "lqro/errors.hpp"

namespace lqro {
namespace {

double sq_excess_mean(std::span<const double> ratio, double dt, double t_f) {
    std::vector<double> f(ratio.size());
    for (std::size_t i = 0; i < ratio.size(); ++i) {
        const double e = std::max(0.0, ratio[i] - 1.0);
        f[i] = e * e;
    }
    return trapezoid(f, dt) / t_f;
}

RewardBreakdown score(std::span<const double> gc, std::span<const double> gz,
                      const SystemParams& p, const RewardWeights& w, const UniformGrid& grid) {
    const Trajectory tr = propagate(gc, p);
    RewardBreakdown b;
    b.r_snr = reward_snr(tr, w, p);
    b.p_n = penalty_photon(tr, p);
    b.p_area = penalty_area(gc, w, grid);
    b.p_g = penalty_coupling(gz, p, grid);
    b.snr_tf = tr.snr_tf();
    b.peak_photon = tr.peak_photon;
    for (double g : gz) b.max_abs_gz = std::max(b.max_abs_gz, std::abs(g));
    b.total = compose_total(b, w);
    return b;
}

}  // namespace

std::vector<std::string> RewardWeights::violations() const {
    std::vector<std::string> out;
    if (!(epsilon > 0.0)) out.emplace_back("epsilon > 0");
    if (!(a_seed > 0.0)) out.emplace_back("a_seed > 0");
    if (w_tf < 0.0 || w_avg < 0.0) out.emplace_back("w_tf, w_avg >= 0");
    if (lambda_n < 0.0 || lambda_area < 0.0 || lambda_g < 0.0)
        out.emplace_back("lambda_n, lambda_area, lambda_g >= 0");
    return out;
}

double compose_total(const RewardBreakdown& b, const RewardWeights& w) {
    return b.r_snr - w.lambda_n * b.p_n - w.lambda_area * b.p_area - w.lambda_g * b.p_g;
}

double trapezoid(std::span<const double> f, double dt) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * dt;
}

double reward_snr(const Trajectory& tr, const RewardWeights& w, const SystemParams& p) {
    const double dt = p.t_f / (p.n_grid - 1);
    const double avg = trapezoid(tr.snr, dt) / p.t_f + w.epsilon;
    return w.w_tf * std::log(tr.snr_tf() + w.epsilon) + w.w_avg * std::log(avg);
}

double penalty_photon(const Trajectory& tr, const SystemParams& p) {
    std::vector<double> ratio(tr.photon.size());
    for (std::size_t i = 0; i < ratio.size(); ++i) ratio[i] = tr.photon[i] / p.n_max;
    return sq_excess_mean(ratio, p.t_f / (p.n_grid - 1), p.t_f);
}

double penalty_area(std::span<const double> gc, const RewardWeights& w, const UniformGrid& grid) {
    std::vector<double> a(gc.size());
    std::transform(gc.begin(), gc.end(), a.begin(), [](double x) { return std::abs(x); });
    const double r = trapezoid(a, grid.dt()) / w.a_seed - 1.0;
    return r * r;
}

double penalty_coupling(std::span<const double> gz, const SystemParams& p, const UniformGrid& grid) {
    if (!p.g_max) return 0.0;
    std::vector<double> ratio(gz.size());
    for (std::size_t i = 0; i < ratio.size(); ++i) ratio[i] = std::abs(gz[i]) / *p.g_max;
    return sq_excess_mean(ratio, grid.dt(), grid.t_f());
}

RewardModel::RewardModel(SplineBasis basis, SystemParams params, RewardWeights weights)
    : basis_(std::move(basis)),
      params_(params),
      weights_(weights),
      grid_(params),
      table_(basis_, grid_.times()) {
    if (std::abs(basis_.t_f() - params_.t_f) > 1e-12 * params_.t_f)
        throw DomainError("spline basis and system parameters disagree on t_f");
}

std::vector<double> RewardModel::gc(std::span<const double> coeffs) const {
    std::vector<double> out(grid_.times().size());
    table_.gc(coeffs, out);
    return out;
}

std::vector<double> RewardModel::gz(std::span<const double> coeffs) const {
    std::vector<double> out(grid_.times().size());
    table_.gz(coeffs, params_.omega_r, out);
    return out;
}

RewardBreakdown RewardModel::evaluate(std::span<const double> coeffs) const {
    if (static_cast<int>(coeffs.size()) != basis_.n_basis())
        throw DomainError("coefficient count does not match the spline basis");
    const auto g_c = gc(coeffs);
    const auto g_z = gz(coeffs);
    return score(g_c, g_z, params_, weights_, grid_);
}

RewardBreakdown RewardModel::evaluate_free(std::span<const double> free) const {
    const auto pulse = SplinePulse::from_free(basis_, free);
    return evaluate(pulse.coeffs());
}

RewardBreakdown total_reward(std::span<const double> coeffs, const SplineBasis& basis,
                             const SystemParams& params, const RewardWeights& weights) {
    const SplinePulse pulse(basis, {coeffs.begin(), coeffs.end()});
    if (!pulse.is_clamped()) throw DomainError("total_reward requires clamped coefficients");
    const UniformGrid grid(params);
    const auto g_c = eval_gc(pulse, grid.times());
    const auto g_z = reconstruct_gz(pulse, params, grid.times());
    return score(g_c, g_z, params, weights, grid);
}

}  // namespace lqro
