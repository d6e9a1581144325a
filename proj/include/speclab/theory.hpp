#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rational.hpp"

namespace speclab {

/// Arithmetic policy for exponent bookkeeping. The Rational instantiation is
/// exact; the double instantiation compares with a 1e-12 relative slack so
/// that knife-edge case boundaries (gamma == p*(s+1), u == integer) survive
/// binary rounding of decimal inputs.
template <class T>
struct ExponentTraits;

template <>
struct ExponentTraits<double> {
    static constexpr double slack = 1e-12;
    static double inf() { return std::numeric_limits<double>::infinity(); }
    static bool is_inf(double x) { return std::isinf(x) && x > 0; }
    static double from_int(std::int64_t v) { return static_cast<double>(v); }
    static double to_double(double x) { return x; }
    static bool eq(double a, double b) {
        if (std::isinf(a) || std::isinf(b)) return a == b;
        return std::abs(a - b) <= slack * std::max({1.0, std::abs(a), std::abs(b)});
    }
    static bool lt(double a, double b) { return a < b && !eq(a, b); }
    static std::int64_t floor(double x) {
        if (std::isinf(x)) throw std::domain_error("floor of infinity");
        const double r = std::round(x);
        if (eq(x, r)) return static_cast<std::int64_t>(r);
        return static_cast<std::int64_t>(std::floor(x));
    }
};

template <>
struct ExponentTraits<Rational> {
    static Rational inf() { return Rational::infinity(); }
    static bool is_inf(const Rational& x) { return x.is_infinite() && x.num() > 0; }
    static Rational from_int(std::int64_t v) { return Rational(v); }
    static double to_double(const Rational& x) { return x.to_double(); }
    static bool eq(const Rational& a, const Rational& b) { return a == b; }
    static bool lt(const Rational& a, const Rational& b) { return a < b; }
    static std::int64_t floor(const Rational& x) { return x.floor(); }
};

namespace detail {
template <class T> bool lt(const T& a, const T& b) { return ExponentTraits<T>::lt(a, b); }
template <class T> bool le(const T& a, const T& b) { return !ExponentTraits<T>::lt(b, a); }
template <class T> bool eq(const T& a, const T& b) { return ExponentTraits<T>::eq(a, b); }
template <class T> T tmin(const T& a, const T& b) { return lt(b, a) ? b : a; }
template <class T> T tmax(const T& a, const T& b) { return lt(a, b) ? b : a; }
template <class T> T num(std::int64_t v) { return ExponentTraits<T>::from_int(v); }
template <class T> bool is_inf(const T& x) { return ExponentTraits<T>::is_inf(x); }
}  // namespace detail

/// Problem parameters: smoothness s, dimension exponent gamma (n ~ d^gamma),
/// filter qualification tau in [1, inf], regularization exponent u (lambda ~ d^-u).
template <class T>
struct RateQuery {
    T s;
    T gamma;
    T tau;
    T u;

    void validate() const {
        using detail::lt;
        using detail::num;
        if (lt(s, num<T>(0)) || detail::is_inf(s)) throw std::invalid_argument("RateQuery: s must be finite and >= 0");
        if (!lt(num<T>(0), gamma) || detail::is_inf(gamma))
            throw std::invalid_argument("RateQuery: gamma must be finite and > 0");
        if (lt(tau, num<T>(1))) throw std::invalid_argument("RateQuery: tau must be >= 1");
        if (!lt(num<T>(0), u)) throw std::invalid_argument("RateQuery: u must be > 0");
    }
};

enum class Regime { over, under, interpolation };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::over: return "over";
        case Regime::under: return "under";
        case Regime::interpolation: return "interpolation";
    }
    return "?";
}

template <class T>
struct MinimaxRate {
    std::int64_t p;
    T exponent;
};

/// Every symbol of the learning-curve theorem for one query.
template <class T>
struct RatePrediction {
    T zeta;
    T v1, v2, b1;
    std::optional<T> b2;  ///< absent when tau = inf, or suppressed at u = inf
    std::int64_t ell_gamma = 0;
    std::optional<std::int64_t> ell_lambda;  ///< absent when u = inf
    std::int64_t ell_tilde = 0;
    T s_tilde;
    std::int64_t p = 0;
    T minimax;
    T gamma_threshold;
    std::optional<T> u_prime;  ///< absent when s = 0
    Regime regime = Regime::over;
    bool benign = false;
    bool saturated = false;
    std::vector<std::string> warnings;
};

/// Smoothness threshold Gamma(gamma) separating benign from non-benign overfitting.
template <class T>
T gamma_threshold(const T& gamma) {
    using namespace detail;
    if (!lt(num<T>(0), gamma)) throw std::invalid_argument("gamma_threshold: gamma must be > 0");
    if (le(gamma, T(num<T>(1) / num<T>(2)))) return ExponentTraits<T>::inf();
    const std::int64_t l = ExponentTraits<T>::floor(gamma);
    const T lg = num<T>(l);
    if (eq(gamma, lg)) return num<T>(0);
    const T half = num<T>(1) / num<T>(2);
    if (l >= 1 && le(gamma, T(lg + half))) return (gamma - lg) / lg;
    return (lg + num<T>(1) - gamma) / (lg + num<T>(1));
}

/// Minimax exponent: p = floor(gamma/(s+1)), exponent max{p - gamma, -(p+1)s}.
template <class T>
MinimaxRate<T> minimax_exponent(const T& s, const T& gamma) {
    using namespace detail;
    if (lt(s, num<T>(0))) throw std::invalid_argument("minimax_exponent: s must be >= 0");
    if (!lt(num<T>(0), gamma)) throw std::invalid_argument("minimax_exponent: gamma must be > 0");
    const std::int64_t p = ExponentTraits<T>::floor(gamma / (s + num<T>(1)));
    const T pp = num<T>(p);
    return {p, tmax(T(pp - gamma), T(-(pp + num<T>(1)) * s))};
}

/// Components (v1, v2, b1, b2) of the learning-curve exponent.
template <class T>
struct ExponentParts {
    T v1, v2, b1;
    std::optional<T> b2;
    std::int64_t ell_tilde;
    T s_tilde;
    bool b2_suppressed = false;

    T max() const {
        T z = detail::tmax(detail::tmax(v1, v2), b1);
        if (b2) z = detail::tmax(z, *b2);
        return z;
    }
};

template <class T>
ExponentParts<T> exponent_parts(const RateQuery<T>& q) {
    using namespace detail;
    q.validate();
    const bool u_inf = is_inf(q.u);
    const bool tau_inf = is_inf(q.tau);
    const std::int64_t lg = ExponentTraits<T>::floor(q.gamma);
    const std::int64_t lt_ = u_inf ? lg : std::min(lg, ExponentTraits<T>::floor(q.u));
    const T L = num<T>(lt_);
    const T s_tilde = tau_inf ? q.s : tmin(q.s, T(num<T>(2) * q.tau));
    ExponentParts<T> out;
    out.ell_tilde = lt_;
    out.s_tilde = s_tilde;
    const T excess = u_inf ? num<T>(0) : tmax(T(q.gamma - q.u), num<T>(0));
    out.v1 = q.gamma - L - num<T>(1) - num<T>(2) * excess;
    out.v2 = L - q.gamma;
    out.b1 = -(L + num<T>(1)) * q.s;
    if (!tau_inf) {
        if (u_inf) {
            out.b2_suppressed = true;
        } else {
            out.b2 = -num<T>(2) * q.tau * q.u + (num<T>(2) * q.tau - s_tilde) * L;
        }
    }
    return out;
}

/// Optimal regularization exponent u'(tau) from the case table (Cases I-IV).
template <class T>
T optimal_u(const T& s, const T& gamma, const T& tau) {
    using namespace detail;
    if (!lt(num<T>(0), s)) throw std::invalid_argument("optimal_u: s must be > 0");
    if (!lt(num<T>(0), gamma)) throw std::invalid_argument("optimal_u: gamma must be > 0");
    if (lt(tau, num<T>(1))) throw std::invalid_argument("optimal_u: tau must be >= 1");
    const T one = num<T>(1), two = num<T>(2);
    const bool tau_inf = is_inf(tau);
    const auto floor_of = [](const T& x) { return num<T>(ExponentTraits<T>::floor(x)); };

    // Case I: 1 <= s <= tau.
    if (le(one, s) && (tau_inf || le(s, tau))) {
        const T p = floor_of(gamma / (s + one));
        if (le(one, p)) {
            if (lt(gamma, T(p * s + p + s))) return p + one / two;            // 1.1
            return (gamma - (p + one) * (s - one)) / two;                      // 1.2
        }
        if (lt(gamma, s)) return tmin(gamma, one) / two;                       // 1.3
        return (gamma - (s - one)) / two;                                      // 1.4
    }
    const T s_tilde = tau_inf ? s : tmin(s, T(two * tau));
    // Case II: s_tilde > tau.
    if (!tau_inf && lt(tau, s_tilde)) {
        if (lt(gamma, one)) return gamma / two;                                // 2.4
        const T pt = floor_of(gamma / (s_tilde + one));
        const T r = gamma - pt * (s_tilde + one);
        if (lt(r, tau)) return pt + r / (two * tau);                           // 2.1
        if (lt(r, T(s_tilde + s_tilde / tau - one)))
            return pt + (r + one) / (two * (tau + one));                       // 2.2
        return pt + (r + one - s_tilde) / two;                                 // 2.3
    }
    const T p = floor_of(gamma / (s + one));
    // Case III: tau < inf, s < 1.
    if (!tau_inf) {
        if (lt(gamma, T(p * s + p + s))) return (gamma + two * tau * p - s * p - p) / (two * tau);  // 3.1
        return p + s / (two * tau);                                                                // 3.2
    }
    // Case IV: tau = inf, s < 1.
    if (le(one, p)) {
        if (lt(gamma, T(p * s + p + s))) return p + s / two;                   // 4.1
        return (gamma + p * (one - s)) / two;                                  // 4.2
    }
    if (lt(gamma, s)) return gamma * tmin(s, T(one / two));                    // 4.3
    return tmin(T(gamma * (one + s) - s), T(gamma / two));                     // 4.4
}

/// Side conditions under which u'(tau) attains the minimum of zeta:
/// tau = inf, or s > 1/(2 tau), or gamma > (2 tau + 1) s / (2 tau (1 + s)).
template <class T>
bool optimal_u_side_condition(const T& s, const T& gamma, const T& tau) {
    using namespace detail;
    if (is_inf(tau)) return true;
    const T one = num<T>(1), two = num<T>(2);
    if (lt(T(one / (two * tau)), s)) return true;
    return lt(T((two * tau + one) * s / (two * tau * (one + s))), gamma);
}

/// Full learning-curve prediction for one query.
template <class T>
RatePrediction<T> learning_curve_exponent(const RateQuery<T>& q) {
    using namespace detail;
    const ExponentParts<T> parts = exponent_parts(q);
    RatePrediction<T> r;
    r.v1 = parts.v1;
    r.v2 = parts.v2;
    r.b1 = parts.b1;
    r.b2 = parts.b2;
    r.zeta = parts.max();
    r.ell_gamma = ExponentTraits<T>::floor(q.gamma);
    if (!is_inf(q.u)) r.ell_lambda = ExponentTraits<T>::floor(q.u);
    r.ell_tilde = parts.ell_tilde;
    r.s_tilde = parts.s_tilde;
    const MinimaxRate<T> mm = minimax_exponent(q.s, q.gamma);
    r.p = mm.p;
    r.minimax = mm.exponent;
    r.gamma_threshold = gamma_threshold(q.gamma);
    if (parts.b2_suppressed)
        r.warnings.emplace_back("interpolation with finite qualification: b2 suppressed, rate not asserted");
    if (lt(num<T>(0), q.s)) {
        r.u_prime = optimal_u(q.s, q.gamma, q.tau);
        if (!optimal_u_side_condition(q.s, q.gamma, q.tau))
            r.warnings.emplace_back("side condition for optimality of u' not met");
        r.benign = le(q.s, r.gamma_threshold);
        r.saturated = lt(q.tau, q.s);
    }
    if (le(q.gamma, q.u)) {
        r.regime = Regime::interpolation;
    } else if (r.u_prime && lt(q.u, *r.u_prime)) {
        r.regime = Regime::over;
    } else if (r.u_prime) {
        r.regime = Regime::under;
    } else {
        r.regime = Regime::over;  // s = 0: no optimum, every u < gamma is treated as over-regularized
    }
    return r;
}

/// Sequence-model exponent max{2u-gamma-l-1, l-gamma, -(l+1)s, b2(l)} with l = floor(u).
template <class T>
T sequence_exponent(const RateQuery<T>& q) {
    using namespace detail;
    q.validate();
    if (is_inf(q.u)) throw std::invalid_argument("sequence_exponent: u = inf (sequence risk diverges)");
    const T one = num<T>(1), two = num<T>(2);
    const T L = num<T>(ExponentTraits<T>::floor(q.u));
    T z = tmax(T(two * q.u - q.gamma - L - one), T(L - q.gamma));
    z = tmax(z, T(-(L + one) * q.s));
    if (!is_inf(q.tau)) {
        const T s_tilde = tmin(q.s, T(two * q.tau));
        z = tmax(z, T(-two * q.tau * q.u + (two * q.tau - s_tilde) * L));
    }
    return z;
}

struct Classification {
    Regime regime;
    bool benign;
    bool saturated;
};

template <class T>
Classification classify(const RateQuery<T>& q) {
    const RatePrediction<T> r = learning_curve_exponent(q);
    return {r.regime, r.benign, r.saturated};
}

inline RateQuery<Rational> to_rational(const RateQuery<double>& q) {
    return {Rational::from_double(q.s), Rational::from_double(q.gamma), Rational::from_double(q.tau),
            Rational::from_double(q.u)};
}

}  // namespace speclab
