#include "lqro/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "lqro/errors.hpp"

namespace lqro {
namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 5.0;

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> free_to_coeffs(const PolicyState& p, std::span<const double> x) {
    std::vector<double> c(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) c[k] = p.scale * x[k];
    return c;
}

}  // namespace

std::string to_string(SeedMode m) { return m == SeedMode::seeded ? "seeded" : "unseeded"; }

SeedMode seed_mode_from_string(const std::string& s) {
    if (s == "seeded") return SeedMode::seeded;
    if (s == "unseeded") return SeedMode::unseeded;
    throw ConfigError("seed_mode must be 'seeded' or 'unseeded', got '" + s + "'");
}

std::vector<std::string> PpoConfig::violations() const {
    std::vector<std::string> out;
    if (batch_size < 2) out.emplace_back("ppo.batch_size >= 2");
    if (epochs < 1) out.emplace_back("ppo.epochs >= 1");
    if (!(clip_eps > 0.0 && clip_eps < 1.0)) out.emplace_back("ppo.clip_eps in (0, 1)");
    if (!(learning_rate > 0.0)) out.emplace_back("ppo.learning_rate > 0");
    if (!(init_std_frac > 0.0)) out.emplace_back("ppo.init_std_frac > 0");
    if (!(baseline_ema >= 0.0 && baseline_ema < 1.0)) out.emplace_back("ppo.baseline_ema in [0, 1)");
    if (max_iterations < 0) out.emplace_back("ppo.max_iterations >= 0");
    if (unseeded_scale < 0.0) out.emplace_back("ppo.unseeded_scale >= 0");
    if (feasibility_tol < 0.0) out.emplace_back("ppo.feasibility_tol >= 0");
    return out;
}

SplinePulse PolicyState::mean_pulse(const SplineBasis& basis) const {
    return SplinePulse::from_free(basis, free_to_coeffs(*this, mean));
}

double PolicyState::std_norm() const {
    double s = 0.0;
    for (double l : log_std) s += std::exp(2.0 * l);
    return std::sqrt(s);
}

double log_prob(std::span<const double> mean, std::span<const double> log_std,
                std::span<const double> x) {
    double lp = -0.5 * static_cast<double>(mean.size()) * std::log(2.0 * std::numbers::pi);
    for (std::size_t k = 0; k < mean.size(); ++k) {
        const double z = (x[k] - mean[k]) * std::exp(-log_std[k]);
        lp -= log_std[k] + 0.5 * z * z;
    }
    return lp;
}

PolicyState init_policy(SeedMode mode, const std::optional<SplinePulse>& seed_pulse,
                        const PpoConfig& config, const RewardModel& model, std::uint64_t rng_seed) {
    const int n = model.basis().n_free();
    PolicyState p;
    p.rng.seed(rng_seed);
    p.mean.assign(static_cast<std::size_t>(n), 0.0);
    if (mode == SeedMode::seeded) {
        if (!seed_pulse) throw ConfigError("seeded initialization requires a seed pulse");
        const auto free = seed_pulse->free_coeffs();
        if (static_cast<int>(free.size()) != n) throw ConfigError("seed pulse basis does not match the model");
        p.scale = max_abs(free);
        if (!(p.scale > 0.0)) throw ConfigError("seed pulse has no nonzero free coefficient");
        for (int k = 0; k < n; ++k) p.mean[static_cast<std::size_t>(k)] = free[static_cast<std::size_t>(k)] / p.scale;
    } else {
        p.scale = config.unseeded_scale;
        if (!(p.scale > 0.0) && seed_pulse) p.scale = max_abs(seed_pulse->free_coeffs());
        if (!(p.scale > 0.0)) throw ConfigError("unseeded initialization requires ppo.unseeded_scale > 0");
    }
    p.log_std.assign(static_cast<std::size_t>(n), std::log(config.init_std_frac));
    p.adam_m.assign(static_cast<std::size_t>(2 * n), 0.0);
    p.adam_v.assign(static_cast<std::size_t>(2 * n), 0.0);
    p.baseline = model.evaluate(p.mean_pulse(model.basis()).coeffs()).total;
    return p;
}

Batch rollout_batch(PolicyState& policy, const PpoConfig& config, const RewardModel& model,
                    Exec exec) {
    const std::size_t n = policy.dim();
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> xs(static_cast<std::size_t>(config.batch_size));
    for (auto& x : xs) {
        x.resize(n);
        for (std::size_t k = 0; k < n; ++k)
            x[k] = policy.mean[k] + std::exp(policy.log_std[k]) * normal(policy.rng);
    }
    const auto scores = score_batch(model, policy.scale, xs, exec);

    Batch batch(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Sample& s = batch[i];
        s.x = std::move(xs[i]);
        s.breakdown = scores[i];
        s.reward = scores[i].total;
        if (!std::isfinite(s.reward)) {
            s.reward = kNonFiniteReward;
            s.flagged = true;
        }
        s.log_prob = log_prob(policy.mean, policy.log_std, s.x);
    }
    return batch;
}

std::vector<double> normalized_advantages(const Batch& batch, double baseline) {
    const auto n = static_cast<double>(batch.size());
    std::vector<double> a(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) a[i] = batch[i].reward - baseline;
    const double mu = std::accumulate(a.begin(), a.end(), 0.0) / n;
    double var = 0.0;
    for (double x : a) var += (x - mu) * (x - mu);
    var /= n;
    const double sd = std::sqrt(var);
    if (!(sd > 1e-12 * (1.0 + std::abs(mu)))) return {};
    for (double& x : a) x = (x - mu) / sd;
    return a;
}

SurrogateTerms clipped_surrogate(std::span<const double> mean, std::span<const double> log_std,
                                 const Batch& batch, std::span<const double> adv, double clip_eps) {
    SurrogateTerms out;
    out.ratio.resize(batch.size());
    out.term.resize(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double r = std::exp(log_prob(mean, log_std, batch[i].x) - batch[i].log_prob);
        const double rc = std::clamp(r, 1.0 - clip_eps, 1.0 + clip_eps);
        out.ratio[i] = r;
        out.term[i] = std::min(r * adv[i], rc * adv[i]);
        out.objective += out.term[i];
    }
    out.objective /= static_cast<double>(batch.size());
    return out;
}

std::vector<double> surrogate_gradient(std::span<const double> mean,
                                       std::span<const double> log_std, const Batch& batch,
                                       std::span<const double> adv, double clip_eps, bool clipped) {
    const std::size_t n = mean.size();
    std::vector<double> g(2 * n, 0.0);
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double r = std::exp(log_prob(mean, log_std, batch[i].x) - batch[i].log_prob);
        // The min() picks the clipped branch, which is flat in theta, only
        // when the ratio has left the trust interval in the advantage's favour.
        if (clipped && ((adv[i] > 0.0 && r > 1.0 + clip_eps) || (adv[i] < 0.0 && r < 1.0 - clip_eps)))
            continue;
        const double w = adv[i] * r * inv_b;
        for (std::size_t k = 0; k < n; ++k) {
            const double inv_s = std::exp(-log_std[k]);
            const double z = (batch[i].x[k] - mean[k]) * inv_s;
            g[k] += w * z * inv_s;
            g[n + k] += w * (z * z - 1.0);
        }
    }
    return g;
}

UpdateResult ppo_update(const PolicyState& policy, const Batch& batch, const PpoConfig& config) {
    if (batch.empty()) throw DomainError("ppo_update: empty batch");
    UpdateResult out{policy, false, {}};
    const auto adv = normalized_advantages(batch, policy.baseline);
    if (adv.empty()) {
        out.skipped = true;
        return out;
    }

    PolicyState& p = out.policy;
    const std::size_t n = p.dim();
    for (int e = 0; e < config.epochs; ++e) {
        const auto g = surrogate_gradient(p.mean, p.log_std, batch, adv, config.clip_eps);
        ++p.adam_steps;
        const double c1 = 1.0 - std::pow(kAdamBeta1, p.adam_steps);
        const double c2 = 1.0 - std::pow(kAdamBeta2, p.adam_steps);
        for (std::size_t k = 0; k < 2 * n; ++k) {
            p.adam_m[k] = kAdamBeta1 * p.adam_m[k] + (1.0 - kAdamBeta1) * g[k];
            p.adam_v[k] = kAdamBeta2 * p.adam_v[k] + (1.0 - kAdamBeta2) * g[k] * g[k];
            const double step =
                config.learning_rate * (p.adam_m[k] / c1) / (std::sqrt(p.adam_v[k] / c2) + kAdamEps);
            if (k < n)
                p.mean[k] += step;
            else
                p.log_std[k - n] = std::clamp(p.log_std[k - n] + step, kLogStdMin, kLogStdMax);
        }
    }
    out.last_terms = clipped_surrogate(p.mean, p.log_std, batch, adv, config.clip_eps);

    double mean_reward = 0.0;
    for (const auto& s : batch) mean_reward += s.reward;
    mean_reward /= static_cast<double>(batch.size());
    p.baseline = config.baseline_ema * p.baseline + (1.0 - config.baseline_ema) * mean_reward;
    return out;
}

Evaluation evaluate_pulse(const RewardModel& model, std::span<const double> coeffs, double tol) {
    Evaluation e{model.evaluate(coeffs), false};
    const auto& p = model.params();
    e.feasible = std::isfinite(e.breakdown.total) && e.breakdown.peak_photon <= p.n_max * (1.0 + tol) &&
                 (!p.g_max || e.breakdown.max_abs_gz <= *p.g_max * (1.0 + tol));
    return e;
}

std::vector<double> TrainingTrace::eval_history(bool feasible_only) const {
    std::vector<double> h;
    h.reserve(records.size() + 1);
    h.push_back(feasible_only && !initial.feasible ? 0.0 : initial.breakdown.snr_tf);
    for (const auto& r : records) h.push_back(feasible_only && !r.eval_feasible ? 0.0 : r.eval_snr);
    return h;
}

TrainResult train(const PpoConfig& config, const RewardModel& model,
                  const std::optional<SplinePulse>& seed_pulse, std::uint64_t rng_seed, Exec exec) {
    PolicyState policy = init_policy(config.seed_mode, seed_pulse, config, model, rng_seed);
    const auto& basis = model.basis();

    auto mean_pulse = policy.mean_pulse(basis);
    Evaluation current = evaluate_pulse(model, mean_pulse.coeffs(), config.feasibility_tol);
    TrainResult out{mean_pulse, current, {}, policy};
    out.trace.rng_seed = rng_seed;
    out.trace.initial = current;
    double best = current.feasible ? current.breakdown.snr_tf : 0.0;
    bool have_feasible = current.feasible;

    auto reached = [&](const Evaluation& e) {
        return config.target_snr && e.feasible && e.breakdown.snr_tf >= *config.target_snr;
    };
    if (reached(current)) {
        out.final_policy = policy;
        return out;
    }

    for (int it = 0; it < config.max_iterations; ++it) {
        Batch batch = rollout_batch(policy, config, model, exec);
        auto upd = ppo_update(policy, batch, config);
        policy = std::move(upd.policy);
        policy.iteration = it + 1;

        mean_pulse = policy.mean_pulse(basis);
        current = evaluate_pulse(model, mean_pulse.coeffs(), config.feasibility_tol);
        if (current.feasible && (!have_feasible || current.breakdown.snr_tf > best)) {
            best = current.breakdown.snr_tf;
            have_feasible = true;
            out.best = mean_pulse;
            out.best_eval = current;
        }

        TraceRecord rec;
        rec.iteration = it + 1;
        const auto nb = static_cast<double>(batch.size());
        for (const auto& s : batch) {
            rec.mean_total += s.reward / nb;
            rec.mean_r_snr += s.breakdown.r_snr / nb;
            rec.mean_p_n += s.breakdown.p_n / nb;
            rec.mean_p_area += s.breakdown.p_area / nb;
            rec.mean_p_g += s.breakdown.p_g / nb;
        }
        rec.eval_snr = current.breakdown.snr_tf;
        rec.eval_peak_photon = current.breakdown.peak_photon;
        rec.eval_feasible = current.feasible;
        rec.best_snr = best;
        rec.std_norm = policy.std_norm();
        rec.skipped = upd.skipped;
        out.trace.records.push_back(rec);

        if (reached(current)) break;
    }
    out.final_policy = std::move(policy);
    return out;
}

std::optional<double> TargetRow::mean_attained(const std::vector<std::optional<int>>& v) {
    double s = 0.0;
    int n = 0;
    for (const auto& x : v) {
        if (x) {
            s += *x;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return s / n;
}

int TargetRow::count_attained(const std::vector<std::optional<int>>& v) {
    return static_cast<int>(std::count_if(v.begin(), v.end(), [](const auto& x) { return x.has_value(); }));
}

std::optional<int> first_reaching(std::span<const double> history, double threshold) {
    for (std::size_t i = 0; i < history.size(); ++i) {
        if (history[i] >= threshold) return static_cast<int>(i);
    }
    return std::nullopt;
}

std::vector<TargetRow> iterations_to_target(const PpoConfig& config, const RewardModel& model,
                                            const SplinePulse& seed_pulse,
                                            std::span<const double> thresholds, int n_runs,
                                            std::uint64_t master_seed, Exec exec) {
    if (n_runs < 1) throw DomainError("iterations_to_target needs n_runs >= 1");
    std::vector<TargetRow> rows(thresholds.size());
    for (std::size_t j = 0; j < thresholds.size(); ++j) rows[j].threshold = thresholds[j];

    PpoConfig cfg = config;
    cfg.target_snr.reset();
    for (SeedMode mode : {SeedMode::seeded, SeedMode::unseeded}) {
        cfg.seed_mode = mode;
        for (int r = 0; r < n_runs; ++r) {
            const auto res = train(cfg, model, seed_pulse, derive_seed(master_seed, static_cast<std::uint64_t>(r)), exec);
            const auto hist = res.trace.eval_history(true);
            for (auto& row : rows) {
                auto& col = mode == SeedMode::seeded ? row.seeded : row.unseeded;
                col.push_back(first_reaching(hist, row.threshold));
            }
        }
    }
    return rows;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace lqro
