#include "lqro/params.hpp"

#include <sstream>

#include "lqro/errors.hpp"

namespace lqro {

std::vector<std::string> SystemParams::violations() const {
    std::vector<std::string> out;
    auto check = [&](bool ok, const char* what) {
        if (!ok) out.emplace_back(what);
    };
    check(kappa > 0.0, "kappa > 0");
    check(omega_r > 0.0, "omega_r > 0");
    check(t_f > 0.0, "t_f > 0");
    check(n_grid >= 2, "n_grid >= 2");
    check(eta > 0.0 && eta <= 1.0, "eta in (0, 1]");
    check(s_eff > 0.0, "s_eff > 0");
    check(n_max > 0.0, "n_max > 0");
    check(!g_max || *g_max > 0.0, "g_max > 0");
    return out;
}

void SystemParams::validate() const {
    auto v = violations();
    if (v.empty()) return;
    std::ostringstream msg;
    msg << "invalid system parameters:";
    for (const auto& s : v) msg << "\n  " << s;
    throw ConfigError(msg.str());
}

UniformGrid::UniformGrid(double t_f, int n) : t_f_(t_f), n_(n) {
    if (!(t_f > 0.0) || n < 2) throw DomainError("uniform grid needs t_f > 0 and n >= 2");
    dt_ = t_f / (n - 1);
    times_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) times_[static_cast<std::size_t>(i)] = dt_ * i;
    times_.back() = t_f;
}

}  // namespace lqro
