#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace speclab {

/// Hard cap on the spherical-harmonic degree handled anywhere in the library.
inline constexpr int kMaxDegreeCap = 32;

/// Clamp t into [-1, 1], rejecting values outside the 1e-12 roundoff band.
inline double clamp_unit(double t, const char* who) {
    if (!(std::abs(t) <= 1.0 + 1e-12)) throw std::domain_error(std::string(who) + ": |t| > 1");
    return std::clamp(t, -1.0, 1.0);
}

/// Normalized Gegenbauer polynomials P_{k,d} (parameter (d-2)/2, P_{k,d}(1) = 1).
///
/// Uses the three-term recurrence
///   P_{k+1}(t) = [(2k + d - 2) t P_k(t) - k P_{k-1}(t)] / (k + d - 2),
/// which keeps every degree normalized at t = 1 exactly.
class GegenbauerBasis {
public:
    GegenbauerBasis(int d, int k_max) : d_(d), k_max_(k_max) {
        if (d < 3) throw std::invalid_argument("GegenbauerBasis: d must be >= 3");
        if (k_max < 0 || k_max > kMaxDegreeCap) throw std::invalid_argument("GegenbauerBasis: k_max out of range");
    }

    int dimension() const { return d_; }
    int max_degree() const { return k_max_; }

    /// P_{0..k_max, d}(t) written to out (size k_max + 1); t assumed in [-1, 1].
    void eval_all(double t, double* out) const { recurrence(d_, k_max_, t, out); }

    std::vector<double> eval_all(double t) const {
        std::vector<double> out(static_cast<std::size_t>(k_max_) + 1);
        eval_all(clamp_unit(t, "gegenbauer"), out.data());
        return out;
    }

    double eval(int k, double t) const {
        if (k < 0 || k > k_max_) throw std::out_of_range("gegenbauer_eval: degree out of range");
        t = clamp_unit(t, "gegenbauer_eval");
        double buf[kMaxDegreeCap + 1];
        recurrence(d_, k, t, buf);
        return buf[k];
    }

    static void recurrence(int d, int k_max, double t, double* out) {
        out[0] = 1.0;
        if (k_max == 0) return;
        out[1] = t;
        for (int k = 1; k < k_max; ++k) {
            out[k + 1] = ((2.0 * k + d - 2.0) * t * out[k] - k * out[k - 1]) / (k + d - 2.0);
        }
    }

private:
    int d_;
    int k_max_;
};

inline double gegenbauer_eval(const GegenbauerBasis& basis, int k, double t) { return basis.eval(k, t); }

/// Exact spherical-harmonic multiplicity N(d, k) = (2k+d-2)/k * C(k+d-3, k-1).
/// Throws std::overflow_error when the value does not fit in 64 bits.
inline std::uint64_t multiplicity(int d, int k) {
    if (d < 3) throw std::invalid_argument("multiplicity: d must be >= 3");
    if (k < 0) throw std::invalid_argument("multiplicity: k must be >= 0");
    if (k == 0) return 1;
    constexpr unsigned __int128 limit = std::numeric_limits<std::uint64_t>::max();
    // C(k+d-3, k-1) built incrementally; each prefix is itself a binomial coefficient.
    unsigned __int128 c = 1;
    const std::uint64_t top = static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(d) - 3;
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(k) - 1; ++i) {
        c = c * (top - i) / (i + 1);
        if (c > limit) throw std::overflow_error("multiplicity: exceeds 64-bit range");
    }
    const unsigned __int128 num = c * static_cast<unsigned __int128>(2 * k + d - 2);
    const unsigned __int128 n = num / static_cast<unsigned>(k);
    if (n > limit) throw std::overflow_error("multiplicity: exceeds 64-bit range");
    return static_cast<std::uint64_t>(n);
}

/// N(d, k) as a double via log-gamma; valid far beyond the 64-bit range.
inline double multiplicity_real(int d, int k) {
    if (d < 3) throw std::invalid_argument("multiplicity_real: d must be >= 3");
    if (k < 0) throw std::invalid_argument("multiplicity_real: k must be >= 0");
    if (k == 0) return 1.0;
    try {
        return static_cast<double>(multiplicity(d, k));
    } catch (const std::overflow_error&) {
        const double lc = std::lgamma(k + d - 2.0) - std::lgamma(d - 1.0) - std::lgamma(static_cast<double>(k));
        return (2.0 * k + d - 2.0) / k * std::exp(lc);
    }
}

/// n points on S^{d-1} stored as rows, plus the seed that produced them.
struct SpherePointSet {
    Eigen::MatrixXd X;
    std::uint64_t seed = 0;

    Eigen::Index size() const { return X.rows(); }
    Eigen::Index dimension() const { return X.cols(); }
};

/// n i.i.d. uniform points on S^{d-1} via normalized standard Gaussian vectors.
inline SpherePointSet sample_sphere(Eigen::Index n, int d, RngStream& stream) {
    if (n < 1) throw std::invalid_argument("sample_sphere: n must be >= 1");
    if (d < 3) throw std::invalid_argument("sample_sphere: d must be >= 3");
    SpherePointSet out;
    out.seed = stream.seed();
    out.X.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) out.X(i, j) = stream.normal();
        double norm = out.X.row(i).norm();
        while (norm == 0.0) {  // probability zero, but keep the contract
            for (int j = 0; j < d; ++j) out.X(i, j) = stream.normal();
            norm = out.X.row(i).norm();
        }
        out.X.row(i) /= norm;
    }
    return out;
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(n - 1 - i);
        x[a] = -z;
        x[b] = z;
        w[a] = w[b] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

/// log of the surface-area ratio omega_{d-2} / omega_{d-1} = Gamma(d/2) / (sqrt(pi) Gamma((d-1)/2)).
inline double log_area_ratio(int d) {
    return std::lgamma(d / 2.0) - 0.5 * std::log(std::numbers::pi) - std::lgamma((d - 1.0) / 2.0);
}

struct QuadratureOptions {
    int initial_nodes = 32;
    int max_nodes = 8192;
    double rel_tol = 1e-8;
    double abs_floor = 1e-14;  ///< relative to the integral of |Phi P_k| w, guards exact zeros
};

/// Funk-Hecke eigenvalues mu_0..mu_{k_max} of the inner-product kernel with profile phi on S^{d-1}:
///   mu_k = (omega_{d-2}/omega_{d-1}) * int_{-1}^{1} phi(t) P_{k,d}(t) (1 - t^2)^{(d-3)/2} dt.
///
/// For d <= 400 the integral is taken in t = cos(theta) (weight sin^{d-2}, smooth at the poles, so
/// profiles with sqrt(1 - t^2) terms integrate spectrally); for larger d in t = z / sqrt(d) over
/// |z| <= min(sqrt(d), 14). Node counts double until every degree agrees to rel_tol.
template <class Profile>
std::vector<double> funk_hecke_eigenvalues(const Profile& phi, int d, int k_max, const QuadratureOptions& opt = {}) {
    if (d < 3) throw std::invalid_argument("funk_hecke: d must be >= 3");
    if (k_max < 0 || k_max > kMaxDegreeCap) throw std::invalid_argument("funk_hecke: k_max out of range");
    const auto K = static_cast<std::size_t>(k_max) + 1;
    const double log_c = log_area_ratio(d);
    const bool gaussian_limit = d > 400;
    const double sqrt_d = std::sqrt(static_cast<double>(d));
    const double zmax = std::min(sqrt_d, 14.0);

    auto integrate = [&](int nodes, std::vector<double>& value, std::vector<double>& scale) {
        const auto [x, w] = gauss_legendre(nodes);
        value.assign(K, 0.0);
        scale.assign(K, 0.0);
        double P[kMaxDegreeCap + 1];
        for (std::size_t i = 0; i < x.size(); ++i) {
            double t, weight;
            if (!gaussian_limit) {
                const double theta = 0.5 * std::numbers::pi * (x[i] + 1.0);
                const double st = std::sin(theta);
                t = std::cos(theta);
                if (st <= 0.0) continue;
                weight = 0.5 * std::numbers::pi * w[i] * std::exp(log_c + (d - 2.0) * std::log(st));
            } else {
                const double z = zmax * x[i];
                t = z / sqrt_d;
                weight = zmax * w[i] *
                         std::exp(log_c + 0.5 * (d - 3.0) * std::log1p(-z * z / d) - std::log(sqrt_d));
            }
            t = std::clamp(t, -1.0, 1.0);
            const double f = phi(t);
            GegenbauerBasis::recurrence(d, k_max, t, P);
            for (std::size_t k = 0; k < K; ++k) {
                value[k] += weight * f * P[k];
                scale[k] += weight * std::abs(f * P[k]);
            }
        }
    };

    std::vector<double> prev, prev_scale, cur, cur_scale;
    int nodes = opt.initial_nodes;
    integrate(nodes, prev, prev_scale);
    while (true) {
        nodes *= 2;
        if (nodes > opt.max_nodes)
            throw std::runtime_error("funk_hecke: quadrature did not converge within " +
                                     std::to_string(opt.max_nodes) + " nodes (d=" + std::to_string(d) + ")");
        integrate(nodes, cur, cur_scale);
        bool converged = true;
        for (std::size_t k = 0; k < K; ++k) {
            const double tol = opt.rel_tol * std::abs(cur[k]) + opt.abs_floor * cur_scale[k];
            if (std::abs(cur[k] - prev[k]) > tol) converged = false;
        }
        if (converged) return cur;
        prev.swap(cur);
        prev_scale.swap(cur_scale);
    }
}

template <class Profile>
double funk_hecke_eigenvalue(const Profile& phi, int d, int k, const QuadratureOptions& opt = {}) {
    if (k < 0) throw std::invalid_argument("funk_hecke: k must be >= 0");
    return funk_hecke_eigenvalues(phi, d, k, opt)[static_cast<std::size_t>(k)];
}

/// Per-degree eigenvalues and multiplicities of an inner-product kernel on S^{d-1}.
struct EigenStructure {
    int d = 0;
    int k_max = 0;
    std::vector<double> mu;            ///< mu_k, k = 0..k_max
    std::vector<double> multiplicity;  ///< N(d, k) (exact when below 2^53)
    double trace = 0.0;                ///< Phi(1)
    double trace_tail = 0.0;           ///< Phi(1) - sum_{k <= k_max} mu_k N(d, k)

    /// Sum of mu_k N(d, k) over degrees strictly above ell (within the truncation).
    double tail_sum(int ell) const {
        double s = 0.0;
        for (int k = ell + 1; k <= k_max; ++k) s += mu[static_cast<std::size_t>(k)] * multiplicity[static_cast<std::size_t>(k)];
        return s;
    }
};

/// Idealized spectrum mu_k = d^{-k} with exact multiplicities (used for clean rate checks).
inline EigenStructure idealized_eigen_structure(int d, int k_max) {
    if (d < 3) throw std::invalid_argument("idealized_eigen_structure: d must be >= 3");
    if (k_max < 0 || k_max > kMaxDegreeCap) throw std::invalid_argument("idealized_eigen_structure: k_max out of range");
    EigenStructure es;
    es.d = d;
    es.k_max = k_max;
    double total = 0.0;
    for (int k = 0; k <= k_max; ++k) {
        es.mu.push_back(std::pow(static_cast<double>(d), -k));
        es.multiplicity.push_back(multiplicity_real(d, k));
        total += es.mu.back() * es.multiplicity.back();
    }
    es.trace = total;
    es.trace_tail = 0.0;
    return es;
}

}  // namespace speclab
