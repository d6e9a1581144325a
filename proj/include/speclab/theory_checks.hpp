#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "theory.hpp"

namespace speclab {

/// Outcome of a structural property sweep over a parameter grid.
struct PropertyCheck {
    std::string name;
    std::size_t cases = 0;
    std::vector<std::string> failures;
    bool pass() const { return failures.empty(); }
};

/// Triple (s, gamma, tau) of exact parameters.
struct ExponentTriple {
    Rational s, gamma, tau;
    std::string str() const {
        return "(s=" + s.str() + ", gamma=" + gamma.str() + ", tau=" + tau.str() + ")";
    }
};

inline std::vector<ExponentTriple> triple_grid(const std::vector<Rational>& s_values,
                                               const std::vector<Rational>& gamma_values,
                                               const std::vector<Rational>& tau_values) {
    std::vector<ExponentTriple> out;
    for (const auto& s : s_values)
        for (const auto& g : gamma_values)
            for (const auto& t : tau_values) out.push_back({s, g, t});
    return out;
}

/// Default grid for the regime / dominance / benign / equivalence sweeps:
/// s in {0.5,1,1.5,2.5}, gamma in {0.8,1.2,1.5,2.7}, tau in {1,2,inf}.
inline std::vector<ExponentTriple> regime_triples() {
    return triple_grid({Rational(1, 2), Rational(1), Rational(3, 2), Rational(5, 2)},
                       {Rational(4, 5), Rational(6, 5), Rational(3, 2), Rational(27, 10)},
                       {Rational(1), Rational(2), Rational::infinity()});
}

/// Saturation grid: s in {0.5,1.5,3}, tau in {1,2,4,inf}, gamma in {1.5,3,6}.
inline std::vector<ExponentTriple> saturation_triples() {
    return triple_grid({Rational(1, 2), Rational(3, 2), Rational(3)}, {Rational(3, 2), Rational(3), Rational(6)},
                       {Rational(1), Rational(2), Rational(4), Rational::infinity()});
}

/// Exact u-grid {step, 2 step, ..., upper}.
inline std::vector<Rational> u_grid(const Rational& upper, const Rational& step = Rational(1, 1000)) {
    std::vector<Rational> out;
    for (Rational u = step; u <= upper; u += step) out.push_back(u);
    return out;
}

namespace detail {
inline Rational zeta_at(const ExponentTriple& t, const Rational& u) {
    return exponent_parts(RateQuery<Rational>{t.s, t.gamma, t.tau, u}).max();
}
inline Rational grid_upper(const ExponentTriple& t) { return t.gamma * Rational(3, 2) + Rational(1); }
}  // namespace detail

/// zeta(u) nonincreasing on u <= u', nondecreasing on [u', gamma], constant for u >= gamma.
inline PropertyCheck check_regime_shape(const std::vector<ExponentTriple>& triples) {
    PropertyCheck out{"regime shape", 0, {}};
    for (const auto& t : triples) {
        ++out.cases;
        const Rational up = optimal_u(t.s, t.gamma, t.tau);
        const auto grid = u_grid(detail::grid_upper(t));
        const Rational z_gamma = detail::zeta_at(t, t.gamma);
        std::vector<Rational> z;
        z.reserve(grid.size());
        for (const auto& u : grid) z.push_back(detail::zeta_at(t, u));
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            if (grid[i + 1] <= up && z[i + 1] > z[i]) {
                out.failures.push_back(t.str() + ": increases before u' at u=" + grid[i].str());
                break;
            }
            if (grid[i] >= up && grid[i + 1] <= t.gamma && z[i + 1] < z[i]) {
                out.failures.push_back(t.str() + ": decreases between u' and gamma at u=" + grid[i].str());
                break;
            }
        }
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] >= t.gamma && z[i] != z_gamma) {
                out.failures.push_back(t.str() + ": not flat past gamma at u=" + grid[i].str());
                break;
            }
        }
        if (detail::zeta_at(t, Rational::infinity()) != z_gamma && t.tau.is_infinite())
            out.failures.push_back(t.str() + ": zeta(inf) differs from zeta(gamma)");
    }
    return out;
}

/// For u >= u'(tau), max{v1, v2, b1} >= b2 (b2 never sets zeta past the optimum).
inline PropertyCheck check_dominance(const std::vector<ExponentTriple>& triples) {
    PropertyCheck out{"dominance", 0, {}};
    for (const auto& t : triples) {
        if (t.tau.is_infinite()) continue;
        ++out.cases;
        const Rational up = optimal_u(t.s, t.gamma, t.tau);
        for (const auto& u : u_grid(detail::grid_upper(t))) {
            if (u < up) continue;
            const auto p = exponent_parts(RateQuery<Rational>{t.s, t.gamma, t.tau, u});
            if (max(max(p.v1, p.v2), p.b1) < *p.b2) {
                out.failures.push_back(t.str() + ": b2 dominates at u=" + u.str());
                break;
            }
        }
    }
    return out;
}

/// For 0 < s <= Gamma(gamma): zeta(u) equals the minimax exponent for every u in [u', inf].
inline PropertyCheck check_benign_equality(const std::vector<ExponentTriple>& triples) {
    PropertyCheck out{"benign equality", 0, {}};
    for (const auto& t : triples) {
        if (!(t.s <= gamma_threshold(t.gamma))) continue;
        ++out.cases;
        const Rational up = optimal_u(t.s, t.gamma, t.tau);
        const Rational mm = minimax_exponent(t.s, t.gamma).exponent;
        auto grid = u_grid(detail::grid_upper(t));
        grid.push_back(up);
        if (t.tau.is_infinite()) grid.push_back(Rational::infinity());
        for (const auto& u : grid) {
            if (u < up) continue;
            if (detail::zeta_at(t, u) != mm) {
                out.failures.push_back(t.str() + ": zeta != minimax at u=" + u.str());
                break;
            }
        }
    }
    return out;
}

/// For s > Gamma(gamma): some u in (u', gamma) has zeta(u) > minimax exponent.
inline PropertyCheck check_nonbenign_gap(const std::vector<ExponentTriple>& triples) {
    PropertyCheck out{"non-benign gap", 0, {}};
    for (const auto& t : triples) {
        if (t.s <= gamma_threshold(t.gamma)) continue;
        ++out.cases;
        const Rational up = optimal_u(t.s, t.gamma, t.tau);
        const Rational mm = minimax_exponent(t.s, t.gamma).exponent;
        bool found = false;
        for (const auto& u : u_grid(t.gamma)) {
            if (u > up && u < t.gamma && detail::zeta_at(t, u) > mm) {
                found = true;
                break;
            }
        }
        if (!found) out.failures.push_back(t.str() + ": no gap above minimax in (u', gamma)");
    }
    return out;
}

/// min_u zeta equals the minimax exponent iff tau >= s, over triples meeting the side conditions.
inline PropertyCheck check_saturation(const std::vector<ExponentTriple>& triples) {
    PropertyCheck out{"saturation iff tau < s", 0, {}};
    for (const auto& t : triples) {
        if (!optimal_u_side_condition(t.s, t.gamma, t.tau)) continue;
        ++out.cases;
        auto grid = u_grid(detail::grid_upper(t));
        grid.push_back(optimal_u(t.s, t.gamma, t.tau));
        Rational zmin = Rational::infinity();
        for (const auto& u : grid) zmin = min(zmin, detail::zeta_at(t, u));
        const Rational mm = minimax_exponent(t.s, t.gamma).exponent;
        const bool attains = zmin == mm;
        const bool expected = t.tau >= t.s;
        if (attains != expected)
            out.failures.push_back(t.str() + ": min zeta=" + zmin.str() + ", minimax=" + mm.str() +
                                   (attains ? " (attained although tau < s)" : " (not attained although tau >= s)"));
    }
    return out;
}

/// Kernel exponent at u equals the sequence exponent at min(u, gamma); flat past gamma.
inline PropertyCheck check_sequence_equivalence(const std::vector<ExponentTriple>& triples) {
    PropertyCheck out{"sequence equivalence", 0, {}};
    for (const auto& t : triples) {
        ++out.cases;
        const Rational z_gamma = detail::zeta_at(t, t.gamma);
        for (const auto& u : u_grid(detail::grid_upper(t))) {
            const Rational zk = detail::zeta_at(t, u);
            const bool ok = u <= t.gamma
                                ? zk == sequence_exponent(RateQuery<Rational>{t.s, t.gamma, t.tau, u})
                                : zk == z_gamma;
            if (!ok) {
                out.failures.push_back(t.str() + ": mismatch at u=" + u.str());
                break;
            }
        }
    }
    return out;
}

/// zeta(u') equals the grid minimum of zeta within grid resolution, for triples meeting the side conditions.
inline PropertyCheck check_optimal_u(const std::vector<ExponentTriple>& triples,
                                     const Rational& step = Rational(1, 1000)) {
    PropertyCheck out{"optimality of u'", 0, {}};
    for (const auto& t : triples) {
        if (!optimal_u_side_condition(t.s, t.gamma, t.tau)) continue;
        ++out.cases;
        const Rational up = optimal_u(t.s, t.gamma, t.tau);
        const Rational z_up = detail::zeta_at(t, up);
        Rational zmin = Rational::infinity();
        for (const auto& u : u_grid(detail::grid_upper(t), step)) zmin = min(zmin, detail::zeta_at(t, u));
        // zeta is piecewise linear with slope magnitude at most max(2, 2 tau).
        const Rational slope = t.tau.is_infinite() ? Rational(2) : max(Rational(2), Rational(2) * t.tau);
        if (z_up > zmin || zmin - z_up > slope * step)
            out.failures.push_back(t.str() + ": zeta(u')=" + z_up.str() + " vs grid min " + zmin.str());
    }
    return out;
}

}  // namespace speclab
