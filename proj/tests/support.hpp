#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "lqro/spline.hpp"

namespace lqro::testing {

// Textbook Cox-de Boor recursion with the 0/0 = 0 convention; the right end
// point is assigned to the last non-degenerate interval.
inline double cox_de_boor(const std::vector<double>& u, int i, int p, double t) {
    if (p == 0) {
        const double tf = u.back();
        if (t == tf) {
            int last = static_cast<int>(u.size()) - 2;
            while (last > 0 && u[last] == u[last + 1]) --last;
            return i == last ? 1.0 : 0.0;
        }
        return (u[i] <= t && t < u[i + 1]) ? 1.0 : 0.0;
    }
    double a = 0.0, b = 0.0;
    const double d1 = u[i + p] - u[i];
    const double d2 = u[i + p + 1] - u[i + 1];
    if (d1 != 0.0) a = (t - u[i]) / d1 * cox_de_boor(u, i, p - 1, t);
    if (d2 != 0.0) b = (u[i + p + 1] - t) / d2 * cox_de_boor(u, i + 1, p - 1, t);
    return a + b;
}

inline double brute_force_spline(const SplinePulse& pulse, double t) {
    const auto& u = pulse.basis().knots();
    double s = 0.0;
    for (int k = 0; k < pulse.basis().n_basis(); ++k)
        s += pulse.coeffs()[k] * cox_de_boor(u, k, 3, t);
    return s;
}

inline std::vector<double> random_free(int n, double amp, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-amp, amp);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = d(rng);
    return v;
}

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double max_rel_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m / std::max(max_abs(b), 1e-300);
}

}  // namespace lqro::testing
