#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace lqro {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Physical constants of the single-mode readout model. Every rate is an
/// angular frequency in rad/s; times are in seconds.
struct SystemParams {
    double kappa = kTwoPi * 1.0e6;    ///< cavity energy decay rate
    double omega_r = kTwoPi * 6.6e9;  ///< resonator frequency
    double omega_q = kTwoPi * 5.0e9;  ///< qubit frequency, kept for the record only
    double t_f = 6.0 * std::numbers::pi / (100.0 * kTwoPi * 1.0e6);
    int n_grid = 5001;
    double eta = 1.0;                 ///< detection efficiency
    double s_eff = 1.0;               ///< noise spectral density (record units^2 s)
    double n_max = 50.0;              ///< photon cap
    std::optional<double> g_max;      ///< physical coupling cap

    /// Violated invariants, one human-readable entry each; empty if valid.
    [[nodiscard]] std::vector<std::string> violations() const;
    /// Throws ConfigError listing every violated invariant.
    void validate() const;
};

/// Uniform grid of `n` points on [0, t_f].
class UniformGrid {
public:
    UniformGrid(double t_f, int n);
    explicit UniformGrid(const SystemParams& p) : UniformGrid(p.t_f, p.n_grid) {}

    [[nodiscard]] int size() const { return n_; }
    [[nodiscard]] double t_f() const { return t_f_; }
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] double operator[](int i) const { return times_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] const std::vector<double>& times() const { return times_; }

private:
    double t_f_;
    int n_;
    double dt_;
    std::vector<double> times_;
};

}  // namespace lqro
