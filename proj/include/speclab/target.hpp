#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "kernel.hpp"
#include "rng.hpp"
#include "sphere.hpp"

namespace speclab {

/// Smoothness and sampling parameters of the synthetic regression problem.
struct TargetSpec {
    double s = 1.0;
    double sigma = 1.0;
    int n_test = 1000;

    void validate() const {
        if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("TargetSpec: s must be finite and >= 0");
        if (!(sigma >= 0.0)) throw std::invalid_argument("TargetSpec: sigma must be >= 0");
        if (n_test < 1) throw std::invalid_argument("TargetSpec: n_test must be >= 1");
    }
};

inline constexpr int kAnchorCount = 3;
inline constexpr double kAnchorCoherenceBound = 2.9;
inline constexpr int kAnchorMaxAttempts = 1000;

/// Three anchor directions with sum_{i != i'} |<xi_i, xi_i'>| <= 2.9.
struct AnchorSet {
    Eigen::MatrixXd xi;  ///< 3 x d, rows are unit vectors
    int attempts = 0;

    double coherence() const {
        const Eigen::MatrixXd G = xi * xi.transpose();
        double c = 0.0;
        for (int i = 0; i < kAnchorCount; ++i)
            for (int j = 0; j < kAnchorCount; ++j)
                if (i != j) c += std::abs(G(i, j));
        return c;
    }
};

/// Rejection-sample uniform anchor triplets until the coherence constraint holds.
inline AnchorSet sample_anchors(int d, RngStream& stream) {
    if (d < 3) throw std::invalid_argument("sample_anchors: d must be >= 3");
    for (int attempt = 1; attempt <= kAnchorMaxAttempts; ++attempt) {
        AnchorSet a;
        a.xi = sample_sphere(kAnchorCount, d, stream).X;
        a.attempts = attempt;
        if (a.coherence() <= kAnchorCoherenceBound) return a;
    }
    throw std::runtime_error("sample_anchors: constraint not met after 1000 attempts");
}

enum class TargetMode { kernel_sections, gegenbauer_mix };

/// f*(x) = sum_i K(xi_i, x) when s = 1, otherwise
/// f*(x) = sum_i sum_{k=0}^{2} d^{k(1-s)/2} P_{k,d}(<xi_i, x>).
class RegressionFunction {
public:
    RegressionFunction(KernelSpec kernel, AnchorSet anchors, double s, int d)
        : kernel_(std::move(kernel)), anchors_(std::move(anchors)), s_(s), d_(d), basis_(d, 2) {
        if (anchors_.xi.rows() != kAnchorCount || anchors_.xi.cols() != d)
            throw std::invalid_argument("RegressionFunction: anchors must be 3 x d");
        mode_ = s == 1.0 ? TargetMode::kernel_sections : TargetMode::gegenbauer_mix;
        for (int k = 0; k <= 2; ++k) weight_[static_cast<std::size_t>(k)] = std::pow(static_cast<double>(d), k * (1.0 - s) / 2.0);
    }

    TargetMode mode() const { return mode_; }
    double smoothness() const { return s_; }
    int dimension() const { return d_; }
    const AnchorSet& anchors() const { return anchors_; }
    const KernelSpec& kernel() const { return kernel_; }
    /// Amplitude d^{k(1-s)/2} of degree k in the Gegenbauer mix.
    double degree_weight(int k) const { return weight_.at(static_cast<std::size_t>(k)); }

    /// Pointwise evaluation at a single x on the sphere.
    double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
        if (x.size() != d_) throw std::invalid_argument("RegressionFunction: dimension mismatch");
        double f = 0.0;
        for (int i = 0; i < kAnchorCount; ++i) f += profile(anchors_.xi.row(i).dot(x));
        return f;
    }

    /// Batch evaluation at the rows of X via one matrix product.
    Eigen::VectorXd evaluate(const SpherePointSet& X) const {
        if (X.dimension() != d_) throw std::invalid_argument("RegressionFunction: dimension mismatch");
        const Eigen::MatrixXd T = X.X * anchors_.xi.transpose();
        Eigen::VectorXd out(X.size());
        for (Eigen::Index r = 0; r < X.size(); ++r) {
            double f = 0.0;
            for (int i = 0; i < kAnchorCount; ++i) f += profile(T(r, i));
            out(r) = f;
        }
        return out;
    }

private:
    double profile(double t) const {
        t = std::clamp(t, -1.0, 1.0);
        if (mode_ == TargetMode::kernel_sections) return kernel_.phi_unchecked(t);
        double P[3];
        GegenbauerBasis::recurrence(d_, 2, t, P);
        return weight_[0] * P[0] + weight_[1] * P[1] + weight_[2] * P[2];
    }

    KernelSpec kernel_;
    AnchorSet anchors_;
    double s_;
    int d_;
    GegenbauerBasis basis_;
    TargetMode mode_;
    std::array<double, 3> weight_{};
};

inline RegressionFunction build_target(const KernelSpec& kernel, const TargetSpec& spec, const AnchorSet& anchors,
                                       int d) {
    spec.validate();
    return RegressionFunction(kernel, anchors, spec.s, d);
}

/// Source-condition report for a synthesized target.
struct SourceNormReport {
    double norm_sq = 0.0;          ///< computed squared [H]^s norm over degrees 0..2 (or RKHS norm when s = 1)
    double norm_sq_bound = 0.0;    ///< 9 K_max when s = 1, otherwise equal to norm_sq
    std::array<double, 3> bracket{};         ///< 3 + sum_{i != i'} P_{m,d}(<xi_i, xi_i'>)
    std::array<double, 3> coefficient_sq{};  ///< sum_j theta_{m,j}^2
    std::array<double, 3> energy{};          ///< mu_m^{-s} sum_j theta_{m,j}^2
    std::array<bool, 3> nondegenerate{};     ///< energy >= 0.1
};

/// Degree energies of f* via the addition formula
///   sum_j Y_{m,j}(xi) Y_{m,j}(xi') = N(d, m) P_{m,d}(<xi, xi'>).
inline SourceNormReport source_norm_report(const KernelSpec& kernel, const RegressionFunction& f, int d, double s) {
    if (!(s >= 0.0)) throw std::invalid_argument("source_norm_report: s must be >= 0");
    const EigenStructure es = eigen_structure(kernel, d, 2);
    const Eigen::MatrixXd G = f.anchors().xi * f.anchors().xi.transpose();
    SourceNormReport r;
    for (int m = 0; m <= 2; ++m) {
        const auto mi = static_cast<std::size_t>(m);
        double bracket = kAnchorCount;
        for (int i = 0; i < kAnchorCount; ++i)
            for (int j = 0; j < kAnchorCount; ++j)
                if (i != j) bracket += GegenbauerBasis(d, 2).eval(m, std::clamp(G(i, j), -1.0, 1.0));
        r.bracket[mi] = bracket;
        const double N = es.multiplicity[mi];
        const double mu = es.mu[mi];
        if (f.mode() == TargetMode::kernel_sections) {
            // theta_{m,j} = mu_m sum_i Y_{m,j}(xi_i)
            r.coefficient_sq[mi] = mu * mu * N * bracket;
        } else {
            const double w = f.degree_weight(m);
            r.coefficient_sq[mi] = w * w / N * bracket;
        }
        r.energy[mi] = mu > 0.0 ? std::pow(mu, -s) * r.coefficient_sq[mi] : 0.0;
        r.nondegenerate[mi] = r.energy[mi] >= 0.1;
    }
    if (f.mode() == TargetMode::kernel_sections) {
        double norm = 0.0;
        for (int i = 0; i < kAnchorCount; ++i)
            for (int j = 0; j < kAnchorCount; ++j) norm += kernel.phi_unchecked(std::clamp(G(i, j), -1.0, 1.0));
        r.norm_sq = norm;
        r.norm_sq_bound = 9.0 * kernel.k_max();
    } else {
        r.norm_sq = r.energy[0] + r.energy[1] + r.energy[2];
        r.norm_sq_bound = r.norm_sq;
    }
    return r;
}

/// Seeds of the three independent sampling streams of a dataset.
struct DatasetStreams {
    std::uint64_t train_points;
    std::uint64_t noise;
    std::uint64_t test_points;
};

/// Training sample with noisy labels plus a noiseless test set.
struct Dataset {
    SpherePointSet X;
    Eigen::VectorXd Y;        ///< f*(X) + noise
    Eigen::VectorXd f_train;  ///< f*(X)
    SpherePointSet X_test;
    Eigen::VectorXd f_test;   ///< f*(X_test)
    double sigma = 1.0;
    DatasetStreams seeds{};
};

inline Dataset generate_dataset(const RegressionFunction& target, Eigen::Index n, int d, double sigma,
                                Eigen::Index n_test, const DatasetStreams& streams) {
    if (n < 1 || n_test < 1) throw std::invalid_argument("generate_dataset: n and n_test must be >= 1");
    if (!(sigma >= 0.0)) throw std::invalid_argument("generate_dataset: sigma must be >= 0");
    if (target.dimension() != d) throw std::invalid_argument("generate_dataset: dimension mismatch");
    Dataset ds;
    ds.sigma = sigma;
    ds.seeds = streams;
    RngStream train(streams.train_points), noise(streams.noise), test(streams.test_points);
    ds.X = sample_sphere(n, d, train);
    ds.f_train = target.evaluate(ds.X);
    ds.Y = ds.f_train;
    if (sigma > 0.0)
        for (Eigen::Index i = 0; i < n; ++i) ds.Y(i) += sigma * noise.normal();
    ds.X_test = sample_sphere(n_test, d, test);
    ds.f_test = target.evaluate(ds.X_test);
    return ds;
}

}  // namespace speclab
