#pragma once

#include <span>
#include <vector>

#include "lqro/cavity.hpp"
#include "lqro/params.hpp"
#include "lqro/spline.hpp"

namespace lqro {

struct RewardWeights {
    double w_tf = 1.0;
    double w_avg = 0.5;
    double lambda_n = 1000.0;
    double lambda_area = 1.0;
    double lambda_g = 1000.0;
    double epsilon = 1e-3;
    double a_seed = 1.0;  ///< seed pulse area int |g_c| dt (rad)

    [[nodiscard]] std::vector<std::string> violations() const;
};

struct RewardBreakdown {
    double r_snr = 0.0;
    double p_n = 0.0;
    double p_area = 0.0;
    double p_g = 0.0;
    double total = 0.0;
    double snr_tf = 0.0;
    double peak_photon = 0.0;
    double max_abs_gz = 0.0;
};

/// Recomputes the total from the stored terms; equals RewardBreakdown::total.
double compose_total(const RewardBreakdown& b, const RewardWeights& w);

/// w_tf ln(SNR(t_f) + eps) + w_avg ln(<SNR + eps>_t).
double reward_snr(const Trajectory& traj, const RewardWeights& w, const SystemParams& p);

/// Time-averaged squared relative excess of N(t) over N_max.
double penalty_photon(const Trajectory& traj, const SystemParams& p);

/// (int |g_c| dt / A_seed - 1)^2.
double penalty_area(std::span<const double> gc, const RewardWeights& w, const UniformGrid& grid);

/// Time-averaged squared relative excess of |g_z| over g_max; 0 when no cap is set.
double penalty_coupling(std::span<const double> gz, const SystemParams& p, const UniformGrid& grid);

/// Trapezoid rule on a uniform grid.
double trapezoid(std::span<const double> f, double dt);

/// Reward evaluator bound to one basis, parameter set and weight set. The
/// basis is tabulated on the grid once; evaluate() is pure and reentrant.
class RewardModel {
public:
    RewardModel(SplineBasis basis, SystemParams params, RewardWeights weights);

    [[nodiscard]] const SplineBasis& basis() const { return basis_; }
    [[nodiscard]] const SystemParams& params() const { return params_; }
    [[nodiscard]] const RewardWeights& weights() const { return weights_; }
    [[nodiscard]] const UniformGrid& grid() const { return grid_; }

    /// Full coefficient vector (length n_basis, boundary entries zero).
    [[nodiscard]] RewardBreakdown evaluate(std::span<const double> coeffs) const;
    [[nodiscard]] RewardBreakdown evaluate_free(std::span<const double> free) const;

    [[nodiscard]] std::vector<double> gc(std::span<const double> coeffs) const;
    [[nodiscard]] std::vector<double> gz(std::span<const double> coeffs) const;

private:
    SplineBasis basis_;
    SystemParams params_;
    RewardWeights weights_;
    UniformGrid grid_;
    BasisTable table_;
};

/// eval_gc -> reconstruct_gz -> propagate -> snr_series -> penalties.
RewardBreakdown total_reward(std::span<const double> coeffs, const SplineBasis& basis,
                             const SystemParams& params, const RewardWeights& weights);

}  // namespace lqro
