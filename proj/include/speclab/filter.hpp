#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kernel.hpp"

namespace speclab {

enum class FilterKind { krr, gradient_flow, iterated_ridge, gradient_descent };

/// Analytic spectral filter phi_lambda with residual psi_lambda(z) = 1 - z phi_lambda(z)
/// and qualification tau:
///   KRR              phi = 1/(z + lambda)                 tau = 1
///   gradient flow    phi = (1 - exp(-z/lambda))/z          tau = inf
///   iterated ridge q phi = (1 - (lambda/(z+lambda))^q)/z   tau = q
///   gradient descent phi = (1 - (1 - eta z)^t)/z, t = 1/(eta lambda), tau = inf
/// Only KRR accepts lambda = 0 (kernel interpolation, pseudo-inverse semantics).
class FilterSpec {
public:
    static FilterSpec krr(double lambda) { return FilterSpec(FilterKind::krr, lambda, 1, 0.0); }
    static FilterSpec gradient_flow(double lambda) { return FilterSpec(FilterKind::gradient_flow, lambda, 1, 0.0); }
    static FilterSpec iterated_ridge(int q, double lambda) {
        if (q < 1) throw std::invalid_argument("iterated ridge: q must be >= 1");
        return FilterSpec(FilterKind::iterated_ridge, lambda, q, 0.0);
    }
    static FilterSpec gradient_descent(double eta, double lambda) {
        if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("gradient descent: eta must be > 0");
        return FilterSpec(FilterKind::gradient_descent, lambda, 1, eta);
    }
    /// Gradient descent with t steps of size eta, i.e. lambda = 1/(eta t).
    static FilterSpec gradient_descent_steps(double eta, double t) {
        if (!(t > 0.0)) throw std::invalid_argument("gradient descent: t must be > 0");
        return gradient_descent(eta, 1.0 / (eta * t));
    }

    FilterKind kind() const { return kind_; }
    double lambda() const { return lambda_; }
    int q() const { return q_; }
    double eta() const { return eta_; }
    /// Number of gradient steps t = 1/(eta lambda) (gradient descent only).
    double steps() const { return 1.0 / (eta_ * lambda_); }

    double qualification() const {
        switch (kind_) {
            case FilterKind::krr: return 1.0;
            case FilterKind::iterated_ridge: return q_;
            default: return std::numeric_limits<double>::infinity();
        }
    }

    /// Same filter shape with a different lambda.
    FilterSpec with_lambda(double lambda) const {
        FilterSpec f = *this;
        f.lambda_ = lambda;
        f.validate();
        return f;
    }

    /// Limit of phi_lambda(z) as z -> 0+.
    double phi_at_zero() const {
        if (lambda_ == 0.0) return std::numeric_limits<double>::infinity();
        return kind_ == FilterKind::iterated_ridge ? q_ / lambda_ : 1.0 / lambda_;
    }

    /// phi_lambda(z) for z > 0.
    double phi(double z) const {
        if (!(z > 0.0)) throw std::domain_error("filter_phi: z must be > 0");
        return phi_nonneg(z);
    }

    /// phi_lambda(z) for z >= 0, using the z -> 0+ limit at z = 0.
    double phi_nonneg(double z) const {
        if (z == 0.0) return phi_at_zero();
        switch (kind_) {
            case FilterKind::krr: return 1.0 / (z + lambda_);
            case FilterKind::gradient_flow: {
                const double x = z / lambda_;
                if (x < 1e-8) return (1.0 - 0.5 * x) / lambda_;
                return -std::expm1(-x) / z;
            }
            case FilterKind::iterated_ridge: return -std::expm1(-q_ * std::log1p(z / lambda_)) / z;
            case FilterKind::gradient_descent: return -std::expm1(steps() * log1p_step(z)) / z;
        }
        return 0.0;
    }

    /// psi_lambda(z) = 1 - z phi_lambda(z), z >= 0.
    double psi(double z) const {
        if (!(z >= 0.0)) throw std::domain_error("filter_psi: z must be >= 0");
        if (lambda_ == 0.0) return z > 0.0 ? 0.0 : 1.0;
        switch (kind_) {
            case FilterKind::krr: return lambda_ / (z + lambda_);
            case FilterKind::gradient_flow: return std::exp(-z / lambda_);
            case FilterKind::iterated_ridge: return std::exp(-q_ * std::log1p(z / lambda_));
            case FilterKind::gradient_descent: return std::exp(steps() * log1p_step(z));
        }
        return 0.0;
    }

    /// Taylor coefficients b_0..b_{m-1} of phi_lambda around z = 0, i.e. phi_lambda(A) = sum_j b_j A^j.
    std::vector<double> taylor_coefficients(int m) const {
        if (lambda_ == 0.0) throw std::domain_error("taylor_coefficients: lambda = 0");
        std::vector<double> b(static_cast<std::size_t>(std::max(m, 0)));
        // phi(z) = (1 - psi(z))/z, so b_j = -[z^{j+1}] psi(z).
        double c = 1.0;  // running coefficient of z^{j+1} in psi
        for (int j = 0; j < m; ++j) {
            const double k = j + 1.0;  // power of z
            switch (kind_) {
                case FilterKind::krr: c = (j == 0 ? 1.0 : c) * (-1.0 / lambda_); break;
                case FilterKind::gradient_flow: c = (j == 0 ? 1.0 : c) * (-1.0 / lambda_) / k; break;
                case FilterKind::iterated_ridge:  // (1 + z/lambda)^{-q}
                    c = (j == 0 ? 1.0 : c) * (-q_ - (k - 1.0)) / k / lambda_;
                    break;
                case FilterKind::gradient_descent:  // (1 - eta z)^t
                    c = (j == 0 ? 1.0 : c) * (steps() - (k - 1.0)) / k * (-eta_);
                    break;
            }
            b[static_cast<std::size_t>(j)] = -c;
        }
        return b;
    }

    std::string id() const {
        char buf[32];
        switch (kind_) {
            case FilterKind::krr: return "krr";
            case FilterKind::gradient_flow: return "gf";
            case FilterKind::iterated_ridge: return "it:" + std::to_string(q_);
            case FilterKind::gradient_descent: {
                auto r = std::to_chars(buf, buf + sizeof buf, eta_);
                return "gd:" + std::string(buf, r.ptr);
            }
        }
        return "?";
    }

private:
    FilterSpec(FilterKind k, double lambda, int q, double eta) : kind_(k), lambda_(lambda), q_(q), eta_(eta) {
        validate();
    }

    void validate() const {
        if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) throw std::invalid_argument("filter: lambda must be >= 0");
        if (lambda_ == 0.0 && kind_ != FilterKind::krr)
            throw std::invalid_argument("filter: lambda = 0 is only supported for KRR (interpolation)");
    }

    double log1p_step(double z) const {
        if (!(eta_ * z < 1.0)) throw std::domain_error("gradient descent: step-size condition eta * z < 1 violated");
        return std::log1p(-eta_ * z);
    }

    FilterKind kind_;
    double lambda_;
    int q_;
    double eta_;
};

inline double filter_phi(const FilterSpec& f, double z) { return f.phi(z); }
inline double filter_psi(const FilterSpec& f, double z) { return f.psi(z); }

/// Filter shape parsed from "krr", "gf", "it:<q>", "gd:<eta>"; lambda is supplied separately.
inline FilterSpec parse_filter(std::string_view id, double lambda) {
    if (id == "krr") return FilterSpec::krr(lambda);
    if (id == "gf") return FilterSpec::gradient_flow(lambda);
    auto tail = [&](std::string_view prefix) -> std::string_view {
        return id.substr(0, prefix.size()) == prefix ? id.substr(prefix.size()) : std::string_view{};
    };
    if (auto q = tail("it:"); !q.empty()) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(q.data(), q.data() + q.size(), v);
        if (ec != std::errc{} || ptr != q.data() + q.size()) throw std::invalid_argument("parse_filter: bad q");
        return FilterSpec::iterated_ridge(v, lambda);
    }
    if (auto e = tail("gd:"); !e.empty()) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(e.data(), e.data() + e.size(), v);
        if (ec != std::errc{} || ptr != e.data() + e.size()) throw std::invalid_argument("parse_filter: bad eta");
        return FilterSpec::gradient_descent(v, lambda);
    }
    throw std::invalid_argument("parse_filter: unknown filter id '" + std::string(id) + "'");
}

/// lambda = C_lambda * d^{-u}; u = inf gives lambda = 0.
inline double regularization(double c_lambda, double u, int d) {
    if (!(c_lambda > 0.0)) throw std::invalid_argument("regularization: C_lambda must be > 0");
    if (!(u > 0.0)) throw std::invalid_argument("regularization: u must be > 0");
    if (std::isinf(u)) return 0.0;
    return c_lambda * std::pow(static_cast<double>(d), -u);
}

/// Eigendecomposition of K/n: eigenvalues descending and clamped at zero, orthonormal eigenvectors.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    double lambda_max = 0.0;
    double zero_threshold = 0.0;  ///< eigenvalues below this count as zero
    Eigen::Index n = 0;

    Eigen::Index count_below_threshold() const {
        return (eigenvalues.array() < zero_threshold).count();
    }
};

inline constexpr double kZeroEigenvalueRel = 1e-10;
inline constexpr double kNegativeEigenvalueRel = 1e-8;

/// Symmetric eigendecomposition of the normalized kernel matrix K/n.
inline SpectralDecomposition decompose(const Eigen::MatrixXd& K) {
    const Eigen::Index n = K.rows();
    if (n == 0 || K.cols() != n) throw std::invalid_argument("decompose: matrix must be square and nonempty");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K / static_cast<double>(n));
    if (es.info() != Eigen::Success) throw std::runtime_error("decompose: eigensolver failed");
    SpectralDecomposition out;
    out.n = n;
    out.eigenvalues = es.eigenvalues().reverse();
    out.eigenvectors = es.eigenvectors().rowwise().reverse();
    out.lambda_max = std::max(out.eigenvalues(0), 0.0);
    const double neg_floor = -kNegativeEigenvalueRel * out.lambda_max;
    for (Eigen::Index i = 0; i < n; ++i) {
        double& v = out.eigenvalues(i);
        if (v < neg_floor) throw std::runtime_error("decompose: matrix is not positive semidefinite");
        v = std::max(v, 0.0);
    }
    out.zero_threshold = kZeroEigenvalueRel * out.lambda_max;
    return out;
}

inline SpectralDecomposition decompose(const GramMatrix& G) { return decompose(G.K); }

/// phi_lambda applied to every eigenvalue of the decomposition, with the zero-eigenvalue
/// convention: below threshold, lambda > 0 uses the z -> 0+ limit and lambda = 0 drops the
/// direction (pseudo-inverse). More than 1% dropped directions at lambda = 0 is an error.
inline Eigen::VectorXd filter_weights(const FilterSpec& f, const SpectralDecomposition& dec) {
    const Eigen::Index n = dec.eigenvalues.size();
    Eigen::VectorXd w(n);
    Eigen::Index dropped = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double z = dec.eigenvalues(i);
        if (z < dec.zero_threshold) {
            if (f.lambda() == 0.0) {
                w(i) = 0.0;
                ++dropped;
            } else {
                w(i) = f.phi_at_zero();
            }
        } else {
            w(i) = f.phi_nonneg(z);
        }
    }
    if (dropped * 100 > n) throw std::runtime_error("singular interpolation: more than 1% of the spectrum is zero");
    return w;
}

/// U phi_lambda(D) U^T v.
inline Eigen::VectorXd matrix_filter_apply(const FilterSpec& f, const SpectralDecomposition& dec,
                                           const Eigen::VectorXd& v) {
    if (v.size() != dec.eigenvalues.size()) throw std::invalid_argument("matrix_filter_apply: dimension mismatch");
    const Eigen::VectorXd w = filter_weights(f, dec);
    return dec.eigenvectors * (w.array() * (dec.eigenvectors.transpose() * v).array()).matrix();
}

/// Residual matrix U psi_lambda(D) U^T.
inline Eigen::MatrixXd matrix_residual(const FilterSpec& f, const SpectralDecomposition& dec) {
    Eigen::VectorXd r(dec.eigenvalues.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = f.psi(dec.eigenvalues(i));
    return dec.eigenvectors * r.asDiagonal() * dec.eigenvectors.transpose();
}

/// Largest Omega with psi_lambda(A) >= Omega psi_lambda(B) in Loewner order, i.e. the smallest
/// generalized eigenvalue of the pencil (psi(A), psi(B)). Optional numeric diagnostic for
/// residual dominance; psi(B) must be positive definite.
inline double residual_dominance(const FilterSpec& f, const SpectralDecomposition& a, const SpectralDecomposition& b) {
    if (a.eigenvalues.size() != b.eigenvalues.size())
        throw std::invalid_argument("residual_dominance: dimension mismatch");
    const Eigen::MatrixXd A = matrix_residual(f, a);
    const Eigen::MatrixXd B = matrix_residual(f, b);
    Eigen::LLT<Eigen::MatrixXd> llt(B);
    if (llt.info() != Eigen::Success) throw std::domain_error("residual_dominance: psi(B) is not positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("residual_dominance: eigensolver failed");
    return es.eigenvalues().minCoeff();
}

/// Spectral estimator (1/n) K(X_eval, X) phi_lambda(K/n) Y evaluated at X_eval.
inline Eigen::VectorXd spectral_estimator(const KernelSpec& kernel, const FilterSpec& f, const SpherePointSet& X,
                                          const Eigen::VectorXd& Y, const SpherePointSet& X_eval) {
    if (Y.size() != X.size()) throw std::invalid_argument("spectral_estimator: |Y| != n");
    if (X.dimension() != X_eval.dimension()) throw std::invalid_argument("spectral_estimator: dimension mismatch");
    const SpectralDecomposition dec = decompose(gram(kernel, X));
    const Eigen::VectorXd coef = matrix_filter_apply(f, dec, Y);
    return cross_kernel(kernel, X, X_eval) * coef / static_cast<double>(X.size());
}

}  // namespace speclab
