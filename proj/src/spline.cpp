#include "lqro/spline.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "lqro/errors.hpp"

namespace lqro {
namespace {

constexpr int P = SplineBasis::kDegree;

// de Boor's triangular scheme for a degree-p spline on span s.
double de_boor(int p, std::span<const double> knots, std::span<const double> c, int s, double t) {
    std::array<double, SplineBasis::kOrder> d{};
    for (int j = 0; j <= p; ++j) d[j] = c[static_cast<std::size_t>(j + s - p)];
    for (int r = 1; r <= p; ++r) {
        for (int j = p; j >= r; --j) {
            const double lo = knots[static_cast<std::size_t>(j + s - p)];
            const double hi = knots[static_cast<std::size_t>(j + 1 + s - r)];
            const double alpha = hi > lo ? (t - lo) / (hi - lo) : 0.0;
            d[j] = (1.0 - alpha) * d[j - 1] + alpha * d[j];
        }
    }
    return d[p];
}

// Coefficients of the derivative of a degree-p spline (degree p - 1, knot
// vector with the first and last knot removed).
std::vector<double> derivative_coeffs(int p, std::span<const double> knots,
                                      std::span<const double> c) {
    std::vector<double> q(c.size() - 1);
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        const double h = knots[i + p + 1] - knots[i + 1];
        q[i] = h > 0.0 ? p * (c[i + 1] - c[i]) / h : 0.0;
    }
    return q;
}

void check_clamped_knots(const std::vector<double>& k) {
    if (k.size() < 2 * SplineBasis::kOrder) throw DomainError("knot vector too short");
    if (!std::is_sorted(k.begin(), k.end())) throw DomainError("knot vector must be nondecreasing");
    const double t_f = k.back();
    if (!(t_f > 0.0)) throw DomainError("knot vector must span [0, t_f] with t_f > 0");
    for (int i = 0; i < SplineBasis::kOrder; ++i) {
        if (k[static_cast<std::size_t>(i)] != 0.0 || k[k.size() - 1 - static_cast<std::size_t>(i)] != t_f)
            throw DomainError("knot vector must repeat 0 and t_f four times");
    }
}

}  // namespace

SplineBasis::SplineBasis(int n_basis, double t_f) : n_basis_(n_basis) {
    if (n_basis < 2 * kClampedPerEnd + 2)
        throw DomainError("spline basis needs n_basis >= 8 (at least two free coefficients)");
    if (!(t_f > 0.0)) throw DomainError("spline basis needs t_f > 0");
    const int intervals = n_basis - kDegree;
    knots_.assign(static_cast<std::size_t>(n_basis + kOrder), 0.0);
    for (int i = 0; i < kOrder; ++i) knots_[knots_.size() - 1 - static_cast<std::size_t>(i)] = t_f;
    for (int j = 1; j < intervals; ++j)
        knots_[static_cast<std::size_t>(kDegree + j)] = t_f * static_cast<double>(j) / intervals;
}

SplineBasis::SplineBasis(std::vector<double> knots, bool)
    : n_basis_(static_cast<int>(knots.size()) - kOrder), knots_(std::move(knots)) {}

SplineBasis SplineBasis::from_knots(std::vector<double> knots) {
    check_clamped_knots(knots);
    if (static_cast<int>(knots.size()) - kOrder < 2 * kClampedPerEnd + 2)
        throw DomainError("spline basis needs n_basis >= 8 (at least two free coefficients)");
    return SplineBasis(std::move(knots), true);
}

int SplineBasis::find_span(double t) const {
    const double t_f = knots_.back();
    if (!(t >= 0.0 && t <= t_f)) {
        std::ostringstream msg;
        msg << "time " << t << " outside [0, " << t_f << "]";
        throw DomainError(msg.str());
    }
    if (t == t_f) return n_basis_ - 1;
    auto it = std::upper_bound(knots_.begin() + kDegree, knots_.begin() + n_basis_ + 1, t);
    return static_cast<int>(it - knots_.begin()) - 1;
}

std::array<double, SplineBasis::kOrder> SplineBasis::values(int s, double t) const {
    // Cox-de Boor triangle over the nonzero functions.
    std::array<double, kOrder> n{};
    std::array<double, kOrder> left{}, right{};
    n[0] = 1.0;
    for (int j = 1; j <= P; ++j) {
        left[j] = t - knots_[static_cast<std::size_t>(s + 1 - j)];
        right[j] = knots_[static_cast<std::size_t>(s + j)] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = n[r] / (right[r + 1] + left[j - r]);
            n[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        n[j] = saved;
    }
    return n;
}

std::array<std::array<double, SplineBasis::kOrder>, 3> SplineBasis::derivatives(int s,
                                                                                double t) const {
    // Basis derivatives from the triangular table of lower-degree functions.
    std::array<std::array<double, kOrder>, kOrder> ndu{};
    std::array<double, kOrder> left{}, right{};
    ndu[0][0] = 1.0;
    for (int j = 1; j <= P; ++j) {
        left[j] = t - knots_[static_cast<std::size_t>(s + 1 - j)];
        right[j] = knots_[static_cast<std::size_t>(s + j)] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    std::array<std::array<double, kOrder>, 3> ders{};
    for (int j = 0; j <= P; ++j) ders[0][j] = ndu[j][P];

    std::array<std::array<double, kOrder>, 2> a{};
    for (int r = 0; r <= P; ++r) {
        int s1 = 0, s2 = 1;
        a[0] = {};
        a[1] = {};
        a[0][0] = 1.0;
        for (int k = 1; k <= 2; ++k) {
            double d = 0.0;
            const int rk = r - k, pk = P - k;
            if (r >= k) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : P - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] = d;
            std::swap(s1, s2);
        }
    }
    const double f1 = P, f2 = P * (P - 1);
    for (int j = 0; j <= P; ++j) {
        ders[1][j] *= f1;
        ders[2][j] *= f2;
    }
    return ders;
}

SplinePulse::SplinePulse(SplineBasis basis, std::vector<double> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
    if (static_cast<int>(coeffs_.size()) != basis_.n_basis())
        throw DomainError("coefficient count does not match the spline basis");
}

SplinePulse SplinePulse::from_free(const SplineBasis& basis, std::span<const double> free) {
    if (static_cast<int>(free.size()) != basis.n_free())
        throw DomainError("free coefficient count must be n_basis - 6");
    std::vector<double> c(static_cast<std::size_t>(basis.n_basis()), 0.0);
    std::copy(free.begin(), free.end(), c.begin() + SplineBasis::kClampedPerEnd);
    return {basis, std::move(c)};
}

std::vector<double> SplinePulse::free_coeffs() const {
    return {coeffs_.begin() + SplineBasis::kClampedPerEnd,
            coeffs_.end() - SplineBasis::kClampedPerEnd};
}

bool SplinePulse::is_clamped() const {
    constexpr int m = SplineBasis::kClampedPerEnd;
    for (int i = 0; i < m; ++i) {
        if (coeffs_[static_cast<std::size_t>(i)] != 0.0 || coeffs_[coeffs_.size() - 1 - static_cast<std::size_t>(i)] != 0.0)
            return false;
    }
    return true;
}

SplinePulse SplinePulse::scaled(double s) const {
    auto c = coeffs_;
    for (auto& x : c) x *= s;
    return {basis_, std::move(c)};
}

std::vector<double> eval_gc(const SplinePulse& pulse, std::span<const double> times) {
    const auto& b = pulse.basis();
    std::vector<double> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const int s = b.find_span(times[i]);
        out[i] = de_boor(P, b.knots(), pulse.coeffs(), s, times[i]);
    }
    return out;
}

SplineDerivatives eval_gc_derivs(const SplinePulse& pulse, std::span<const double> times) {
    const auto& b = pulse.basis();
    const std::span<const double> k0(b.knots());
    const auto c1 = derivative_coeffs(P, k0, pulse.coeffs());
    const auto k1 = k0.subspan(1, k0.size() - 2);
    const auto c2 = derivative_coeffs(P - 1, k1, c1);
    const auto k2 = k1.subspan(1, k1.size() - 2);

    SplineDerivatives out{std::vector<double>(times.size()), std::vector<double>(times.size())};
    for (std::size_t i = 0; i < times.size(); ++i) {
        const int s = b.find_span(times[i]);
        out.first[i] = de_boor(P - 1, k1, c1, s - 1, times[i]);
        out.second[i] = de_boor(P - 2, k2, c2, s - 2, times[i]);
    }
    return out;
}

std::vector<double> reconstruct_gz(const SplinePulse& pulse, const SystemParams& params,
                                   std::span<const double> times) {
    if (!pulse.is_clamped()) throw DomainError("g_z reconstruction requires a clamped pulse");
    auto gz = eval_gc(pulse, times);
    const auto d = eval_gc_derivs(pulse, times);
    const double inv_w2 = 1.0 / (params.omega_r * params.omega_r);
    for (std::size_t i = 0; i < gz.size(); ++i) gz[i] += d.second[i] * inv_w2;
    return gz;
}

SplineFit fit_spline_to_function(std::span<const double> times, std::span<const double> target,
                                 const SplineBasis& basis) {
    if (times.size() != target.size()) throw DomainError("fit: times and target differ in length");
    const int n_free = basis.n_free();
    if (static_cast<int>(times.size()) < basis.n_basis())
        throw DomainError("fit: need at least n_basis samples");

    constexpr int off = SplineBasis::kClampedPerEnd;
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(times.size()), n_free);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(times.size()));
    for (std::size_t i = 0; i < times.size(); ++i) {
        const int s = basis.find_span(times[i]);
        const auto v = basis.values(s, times[i]);
        for (int j = 0; j < SplineBasis::kOrder; ++j) {
            const int col = s - P + j - off;
            if (col >= 0 && col < n_free) design(static_cast<Eigen::Index>(i), col) = v[static_cast<std::size_t>(j)];
        }
        rhs(static_cast<Eigen::Index>(i)) = target[i];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < n_free) {
        std::ostringstream msg;
        msg << "fit: design matrix rank " << qr.rank() << " < " << n_free
            << " free coefficients (samples do not cover every basis function)";
        throw NumericalError(msg.str());
    }
    const Eigen::VectorXd x = qr.solve(rhs);
    const double rms = std::sqrt((design * x - rhs).squaredNorm() / static_cast<double>(times.size()));

    std::vector<double> free(x.data(), x.data() + x.size());
    return {SplinePulse::from_free(basis, free), rms};
}

BasisTable::BasisTable(const SplineBasis& basis, std::span<const double> times)
    : n_basis_(basis.n_basis()), spans_(times.size()), value_(times.size()), second_(times.size()) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        const int s = basis.find_span(times[i]);
        const auto d = basis.derivatives(s, times[i]);
        spans_[i] = s;
        value_[i] = d[0];
        second_[i] = d[2];
    }
}

void BasisTable::gc(std::span<const double> c, std::span<double> out) const {
    for (std::size_t i = 0; i < spans_.size(); ++i) {
        const double* ck = c.data() + (spans_[i] - P);
        const auto& v = value_[i];
        out[i] = ck[0] * v[0] + ck[1] * v[1] + ck[2] * v[2] + ck[3] * v[3];
    }
}

void BasisTable::gz(std::span<const double> c, double omega_r, std::span<double> out) const {
    const double inv_w2 = 1.0 / (omega_r * omega_r);
    for (std::size_t i = 0; i < spans_.size(); ++i) {
        const double* ck = c.data() + (spans_[i] - P);
        const auto& v = value_[i];
        const auto& d = second_[i];
        out[i] = ck[0] * v[0] + ck[1] * v[1] + ck[2] * v[2] + ck[3] * v[3] +
                 inv_w2 * (ck[0] * d[0] + ck[1] * d[1] + ck[2] * d[2] + ck[3] * d[3]);
    }
}

}  // namespace lqro
