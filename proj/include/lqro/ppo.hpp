#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lqro/kernels.hpp"
#include "lqro/reward.hpp"
#include "lqro/spline.hpp"

namespace lqro {

enum class SeedMode { seeded, unseeded };

std::string to_string(SeedMode m);
SeedMode seed_mode_from_string(const std::string& s);

struct PpoConfig {
    int batch_size = 64;
    int epochs = 4;
    double clip_eps = 0.2;
    double learning_rate = 3e-2;  ///< Adam step, normalized coefficient units
    double init_std_frac = 0.1;
    double baseline_ema = 0.9;
    int max_iterations = 500;
    std::optional<double> target_snr;
    SeedMode seed_mode = SeedMode::seeded;
    /// Absolute coefficient scale (rad/s) for unseeded runs; seeded runs use
    /// the seed's largest coefficient.
    double unseeded_scale = 0.0;
    /// Relative slack on N_max and g_max when judging feasibility.
    double feasibility_tol = 0.02;

    [[nodiscard]] std::vector<std::string> violations() const;
};

/// Diagonal Gaussian over the free spline coefficients, in units of `scale`.
struct PolicyState {
    std::vector<double> mean;
    std::vector<double> log_std;
    double scale = 1.0;  ///< rad/s per normalized unit
    double baseline = 0.0;
    std::mt19937_64 rng;
    int iteration = 0;
    // Adam moments over (mean, log_std).
    std::vector<double> adam_m;
    std::vector<double> adam_v;
    int adam_steps = 0;

    [[nodiscard]] std::size_t dim() const { return mean.size(); }
    /// Full clamped pulse at the policy mean.
    [[nodiscard]] SplinePulse mean_pulse(const SplineBasis& basis) const;
    [[nodiscard]] double std_norm() const;

    bool operator==(const PolicyState&) const = default;
};

/// Exact log-density of the policy at x (normalized units).
double log_prob(std::span<const double> mean, std::span<const double> log_std,
                std::span<const double> x);

/// Policy mean at the seed's free coefficients (seeded) or at zero
/// (unseeded); baseline at the reward of the mean pulse.
PolicyState init_policy(SeedMode mode, const std::optional<SplinePulse>& seed_pulse,
                        const PpoConfig& config, const RewardModel& model, std::uint64_t rng_seed);

struct Sample {
    std::vector<double> x;  ///< normalized free coefficients
    RewardBreakdown breakdown;
    double reward = 0.0;    ///< breakdown.total, or the clamp value if non-finite
    double log_prob = 0.0;
    bool flagged = false;
};

using Batch = std::vector<Sample>;

inline constexpr double kNonFiniteReward = -1e6;

/// Draws batch_size samples from the policy (advancing its RNG) and scores
/// them. Sampling is sequential, scoring runs through score_batch().
Batch rollout_batch(PolicyState& policy, const PpoConfig& config, const RewardModel& model,
                    Exec exec = Exec::parallel);

/// Batch-normalized advantages (reward - baseline); empty if their variance vanishes.
std::vector<double> normalized_advantages(const Batch& batch, double baseline);

/// Per-sample clipped surrogate terms min(r A, clip(r, 1-eps, 1+eps) A) and
/// ratios r = pi_new / pi_old.
struct SurrogateTerms {
    std::vector<double> ratio;
    std::vector<double> term;
    double objective = 0.0;
};
SurrogateTerms clipped_surrogate(std::span<const double> mean, std::span<const double> log_std,
                                 const Batch& batch, std::span<const double> advantages,
                                 double clip_eps);

/// Analytic gradient of the batch-mean surrogate with respect to
/// (mean, log_std), concatenated. With `clipped = false` it is the gradient of
/// mean(r A).
std::vector<double> surrogate_gradient(std::span<const double> mean,
                                       std::span<const double> log_std, const Batch& batch,
                                       std::span<const double> advantages, double clip_eps,
                                       bool clipped = true);

struct UpdateResult {
    PolicyState policy;
    bool skipped = false;
    SurrogateTerms last_terms;  ///< terms from the final epoch
};

/// `epochs` Adam ascent steps on the clipped surrogate, then the EMA
/// baseline update. A batch with zero advantage variance is skipped and the
/// policy returned unchanged.
UpdateResult ppo_update(const PolicyState& policy, const Batch& batch, const PpoConfig& config);

struct Evaluation {
    RewardBreakdown breakdown;
    bool feasible = false;
};

Evaluation evaluate_pulse(const RewardModel& model, std::span<const double> coeffs, double tol);

struct TraceRecord {
    int iteration = 0;
    double mean_total = 0.0;
    double mean_r_snr = 0.0;
    double mean_p_n = 0.0;
    double mean_p_area = 0.0;
    double mean_p_g = 0.0;
    double eval_snr = 0.0;  ///< SNR(t_f) of the policy mean after this update
    double eval_peak_photon = 0.0;
    bool eval_feasible = false;
    double best_snr = 0.0;  ///< best feasible SNR(t_f) so far
    double std_norm = 0.0;
    bool skipped = false;
};

struct TrainingTrace {
    std::uint64_t rng_seed = 0;
    Evaluation initial;
    std::vector<TraceRecord> records;

    /// Evaluation SNR before any update (index 0) and after each update.
    [[nodiscard]] std::vector<double> eval_history(bool feasible_only) const;
};

struct TrainResult {
    SplinePulse best;
    Evaluation best_eval;
    TrainingTrace trace;
    PolicyState final_policy;
};

/// Rollout/update loop until max_iterations, or until the mean pulse reaches
/// target_snr while feasible. Returns the best feasible mean pulse seen (the
/// initial mean counts), falling back to the initial mean if none was feasible.
TrainResult train(const PpoConfig& config, const RewardModel& model,
                  const std::optional<SplinePulse>& seed_pulse, std::uint64_t rng_seed,
                  Exec exec = Exec::parallel);

struct TargetRow {
    double threshold = 0.0;
    std::vector<std::optional<int>> seeded;
    std::vector<std::optional<int>> unseeded;

    [[nodiscard]] static std::optional<double> mean_attained(const std::vector<std::optional<int>>& v);
    [[nodiscard]] static int count_attained(const std::vector<std::optional<int>>& v);
};

/// First iteration (0 = initial policy) whose feasible mean-pulse SNR(t_f)
/// reaches each threshold, over n_runs RNG streams per initialization mode.
std::optional<int> first_reaching(std::span<const double> history, double threshold);
std::vector<TargetRow> iterations_to_target(const PpoConfig& config, const RewardModel& model,
                                            const SplinePulse& seed_pulse,
                                            std::span<const double> thresholds, int n_runs,
                                            std::uint64_t master_seed, Exec exec = Exec::parallel);

/// Deterministic per-run stream seed derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace lqro
