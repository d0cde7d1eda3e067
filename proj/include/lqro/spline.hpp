#pragma once

#include <array>
#include <span>
#include <vector>

#include "lqro/params.hpp"

namespace lqro {

/// Clamped cubic B-spline basis on [0, t_f].
///
/// The knot vector has n_basis + 4 entries: four copies of 0, n_basis - 4
/// interior knots, four copies of t_f. Basis function k is supported on
/// [knots[k], knots[k + 4]].
class SplineBasis {
public:
    static constexpr int kDegree = 3;
    static constexpr int kOrder = kDegree + 1;
    /// Coefficients pinned to zero at each end.
    static constexpr int kClampedPerEnd = 3;

    /// Uniform interior knots.
    SplineBasis(int n_basis, double t_f);
    /// Arbitrary clamped knot vector (used when reading stored pulses).
    static SplineBasis from_knots(std::vector<double> knots);

    [[nodiscard]] int n_basis() const { return n_basis_; }
    [[nodiscard]] int n_free() const { return n_basis_ - 2 * kClampedPerEnd; }
    [[nodiscard]] double t_f() const { return knots_.back(); }
    [[nodiscard]] const std::vector<double>& knots() const { return knots_; }

    /// Index s of the knot interval [knots[s], knots[s+1]) containing t; the
    /// right end t_f maps to the last non-empty interval.
    [[nodiscard]] int find_span(double t) const;

    /// Values of the four basis functions B_{s-3..s} nonzero on span s.
    [[nodiscard]] std::array<double, kOrder> values(int span, double t) const;

    /// Values, first and second derivatives of B_{s-3..s} at t.
    [[nodiscard]] std::array<std::array<double, kOrder>, 3> derivatives(int span,
                                                                       double t) const;

private:
    explicit SplineBasis(std::vector<double> knots, bool);
    int n_basis_;
    std::vector<double> knots_;
};

/// Auxiliary trajectory g_c(t) = sum_k c_k B_k(t), coefficients in rad/s.
class SplinePulse {
public:
    SplinePulse(SplineBasis basis, std::vector<double> coeffs);

    /// Pulse whose 3 + 3 boundary coefficients are zero and whose interior
    /// coefficients are `free`.
    static SplinePulse from_free(const SplineBasis& basis, std::span<const double> free);

    [[nodiscard]] const SplineBasis& basis() const { return basis_; }
    [[nodiscard]] const std::vector<double>& coeffs() const { return coeffs_; }
    [[nodiscard]] double t_f() const { return basis_.t_f(); }
    [[nodiscard]] std::vector<double> free_coeffs() const;
    /// True when the boundary coefficients are exactly zero.
    [[nodiscard]] bool is_clamped() const;
    [[nodiscard]] SplinePulse scaled(double s) const;

private:
    SplineBasis basis_;
    std::vector<double> coeffs_;
};

struct SplineDerivatives {
    std::vector<double> first;
    std::vector<double> second;
};

/// g_c at each time by de Boor's recursion. Throws DomainError for times
/// outside [0, t_f].
std::vector<double> eval_gc(const SplinePulse& pulse, std::span<const double> times);

/// Analytic first and second derivatives of g_c, evaluated from the
/// degree-reduced derivative splines.
SplineDerivatives eval_gc_derivs(const SplinePulse& pulse, std::span<const double> times);

/// Physical coupling g_z = g_c + g_c'' / omega_r^2. Requires a clamped pulse.
std::vector<double> reconstruct_gz(const SplinePulse& pulse, const SystemParams& params,
                                   std::span<const double> times);

struct SplineFit {
    SplinePulse pulse;
    double residual_rms;
};

/// Least-squares projection of sampled data onto the clamped basis; the six
/// boundary coefficients stay exactly zero. Throws NumericalError if the
/// free-coefficient design matrix is rank deficient.
SplineFit fit_spline_to_function(std::span<const double> times, std::span<const double> target,
                                 const SplineBasis& basis);

/// Basis values and second derivatives tabulated on a fixed set of times,
/// so repeated pulse evaluation on the same grid costs 4 multiply-adds per
/// point.
class BasisTable {
public:
    BasisTable(const SplineBasis& basis, std::span<const double> times);

    [[nodiscard]] std::size_t size() const { return spans_.size(); }
    [[nodiscard]] int n_basis() const { return n_basis_; }

    /// g_c on the tabulated times for a full coefficient vector.
    void gc(std::span<const double> coeffs, std::span<double> out) const;
    /// g_z = g_c + g_c'' / omega_r^2 on the tabulated times.
    void gz(std::span<const double> coeffs, double omega_r, std::span<double> out) const;

private:
    int n_basis_;
    std::vector<int> spans_;
    std::vector<std::array<double, SplineBasis::kOrder>> value_;
    std::vector<std::array<double, SplineBasis::kOrder>> second_;
};

}  // namespace lqro
