#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sphere.hpp"

namespace speclab {

enum class KernelKind { ntk, rbf, power_series };

/// Inner-product kernel K(x, x') = Phi(<x, x'>) on the unit sphere.
///
/// Power-series kernels carry coefficients a_0..a_m (all >= 0) and a tail bound
/// a_{-1} >= sum a_j. The named profiles have Phi(1) = 1, which doubles as their bound.
class KernelSpec {
public:
    static KernelSpec ntk() { return KernelSpec(KernelKind::ntk, {}, 1.0); }
    static KernelSpec rbf() { return KernelSpec(KernelKind::rbf, {}, 1.0); }

    static KernelSpec power_series(std::vector<double> coeffs, std::optional<double> tail_bound = std::nullopt) {
        if (coeffs.empty()) throw std::invalid_argument("power-series kernel: no coefficients");
        double sum = 0.0;
        for (double a : coeffs) {
            if (!std::isfinite(a) || a < 0.0)
                throw std::invalid_argument("power-series kernel: coefficients must be finite and >= 0");
            sum += a;
        }
        const double bound = tail_bound.value_or(sum);
        if (bound < sum) throw std::invalid_argument("power-series kernel: tail bound below coefficient sum");
        return KernelSpec(KernelKind::power_series, std::move(coeffs), bound);
    }

    KernelKind kind() const { return kind_; }
    const std::vector<double>& coefficients() const { return coeffs_; }
    double tail_bound() const { return tail_bound_; }

    /// Profile value Phi(t); |t| <= 1 + 1e-12 is required and clamped.
    double phi(double t) const { return phi_unchecked(clamp_unit(t, "phi_eval")); }

    double phi_unchecked(double t) const {
        switch (kind_) {
            case KernelKind::ntk: {
                const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
                return (s + 2.0 * (std::numbers::pi - std::acos(t)) * t) / (2.0 * std::numbers::pi);
            }
            case KernelKind::rbf:
                return std::exp(t - 1.0);
            case KernelKind::power_series: {
                double acc = 0.0;
                for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
                return acc;
            }
        }
        return 0.0;
    }

    double k_max() const { return phi_unchecked(1.0); }

    std::string id() const {
        switch (kind_) {
            case KernelKind::ntk: return "ntk";
            case KernelKind::rbf: return "rbf";
            case KernelKind::power_series: {
                std::string out = "powser:";
                char buf[32];
                for (std::size_t i = 0; i < coeffs_.size(); ++i) {
                    if (i) out += ',';
                    auto r = std::to_chars(buf, buf + sizeof buf, coeffs_[i]);
                    out.append(buf, r.ptr);
                }
                return out;
            }
        }
        return "?";
    }

private:
    KernelSpec(KernelKind k, std::vector<double> c, double bound)
        : kind_(k), coeffs_(std::move(c)), tail_bound_(bound) {}

    KernelKind kind_;
    std::vector<double> coeffs_;
    double tail_bound_;
};

inline double phi_eval(const KernelSpec& kernel, double t) { return kernel.phi(t); }

/// Parse "ntk", "rbf", or "powser:a0,a1,...".
inline KernelSpec parse_kernel(std::string_view id) {
    if (id == "ntk") return KernelSpec::ntk();
    if (id == "rbf") return KernelSpec::rbf();
    constexpr std::string_view prefix = "powser:";
    if (id.substr(0, prefix.size()) == prefix) {
        std::vector<double> coeffs;
        std::string_view rest = id.substr(prefix.size());
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string_view tok = rest.substr(0, comma);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || ptr != tok.data() + tok.size())
                throw std::invalid_argument("parse_kernel: bad coefficient '" + std::string(tok) + "'");
            coeffs.push_back(v);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        return KernelSpec::power_series(std::move(coeffs));
    }
    throw std::invalid_argument("parse_kernel: unknown kernel id '" + std::string(id) + "'");
}

/// Symmetric kernel matrix K_ij = Phi(<x_i, x_j>) with provenance.
struct GramMatrix {
    Eigen::MatrixXd K;
    std::string kernel_id;
    std::uint64_t seed = 0;
};

/// Kernel matrix of a point set. Inner products are clamped to [-1, 1]; the
/// upper triangle is mirrored so the result is exactly symmetric.
inline GramMatrix gram(const KernelSpec& kernel, const SpherePointSet& X) {
    const Eigen::Index n = X.size();
    if (n == 0) throw std::invalid_argument("gram: empty point set");
    GramMatrix out;
    out.kernel_id = kernel.id();
    out.seed = X.seed;
    out.K.noalias() = X.X * X.X.transpose();
    const double diag = kernel.k_max();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const double v = kernel.phi_unchecked(std::clamp(out.K(i, j), -1.0, 1.0));
            out.K(i, j) = v;
            out.K(j, i) = v;
        }
        out.K(j, j) = diag;
    }
    return out;
}

/// Cross-kernel matrix, entry (i, j) = Phi(<test_i, train_j>).
inline Eigen::MatrixXd cross_kernel(const KernelSpec& kernel, const SpherePointSet& train, const SpherePointSet& test) {
    if (train.dimension() != test.dimension()) throw std::invalid_argument("cross_kernel: dimension mismatch");
    Eigen::MatrixXd C = test.X * train.X.transpose();
    C = C.unaryExpr([&](double t) { return kernel.phi_unchecked(std::clamp(t, -1.0, 1.0)); });
    return C;
}

/// Per-degree eigenvalues (Funk-Hecke) and multiplicities of a kernel on S^{d-1}.
inline EigenStructure eigen_structure(const KernelSpec& kernel, int d, int k_max, const QuadratureOptions& opt = {}) {
    if (k_max < 0 || k_max > kMaxDegreeCap) throw std::invalid_argument("eigen_structure: k_max out of range");
    EigenStructure es;
    es.d = d;
    es.k_max = k_max;
    es.mu = funk_hecke_eigenvalues([&](double t) { return kernel.phi_unchecked(t); }, d, k_max, opt);
    // Every supported profile has nonnegative power-series coefficients, so mu_k >= 0; quadrature
    // noise at the level of the largest eigenvalue times 1e-12 (odd NTK degrees) is zeroed.
    double mu_scale = 0.0;
    for (double m : es.mu) mu_scale = std::max(mu_scale, std::abs(m));
    for (double& m : es.mu)
        if (m < 0.0 && -m <= 1e-12 * mu_scale) m = 0.0;
    es.trace = kernel.k_max();
    double captured = 0.0;
    for (int k = 0; k <= k_max; ++k) {
        es.multiplicity.push_back(multiplicity_real(d, k));
        captured += es.mu[static_cast<std::size_t>(k)] * es.multiplicity.back();
    }
    es.trace_tail = es.trace - captured;
    return es;
}

}  // namespace speclab
