#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "filter.hpp"
#include "kernel.hpp"
#include "rng.hpp"
#include "target.hpp"

namespace speclab {

/// One risk measurement for a fixed (n, d, lambda) and training sample.
struct RiskEstimate {
    double excess_risk = 0.0;
    double bias_sq = 0.0;
    double variance = 0.0;
    double mc_stderr = 0.0;  ///< test-set standard error of excess_risk
    std::optional<double> noise_stderr;  ///< standard error of excess_risk over the label-noise draw
    Eigen::Index n = 0;
    int d = 0;
    double lambda = 0.0;
    std::string filter_id;
    std::string kernel_id;
    int rep = 0;
    std::uint64_t seed = 0;

    /// Standard error for comparing excess_risk with bias_sq + variance.
    double combined_stderr() const {
        const double e = noise_stderr.value_or(0.0);
        return std::sqrt(mc_stderr * mc_stderr + e * e);
    }
};

/// Test-set average of (prediction - f*)^2 with its standard error.
inline RiskEstimate excess_risk_mc(const Dataset& ds, const Eigen::VectorXd& predictions) {
    if (predictions.size() != ds.f_test.size()) throw std::invalid_argument("excess_risk_mc: size mismatch");
    const Eigen::ArrayXd sq = (predictions - ds.f_test).array().square();
    const double T = static_cast<double>(sq.size());
    RiskEstimate r;
    r.excess_risk = sq.mean();
    r.mc_stderr = sq.size() > 1 ? std::sqrt((sq - r.excess_risk).square().sum() / (T - 1.0) / T) : 0.0;
    r.n = ds.X.size();
    r.d = static_cast<int>(ds.X.dimension());
    return r;
}

/// Evaluates any number of filters on one dataset from a single eigendecomposition of K/n.
///
/// With K/n = U D U^T and P = K(X_test, X) U, the estimator at the test points is
/// P (phi(D) o U^T Y) / n, and the conditional variance at x is
/// sigma^2 sum_j (phi(D_j) / n)^2 P_{xj}^2.
class SpectralRiskEvaluator {
public:
    SpectralRiskEvaluator(const KernelSpec& kernel, const Dataset& ds, bool with_noise_stderr = false)
        : ds_(&ds), kernel_id_(kernel.id()) {
        dec_ = decompose(gram(kernel, ds.X));
        P_.noalias() = cross_kernel(kernel, ds.X, ds.X_test) * dec_.eigenvectors;
        P_sq_ = P_.array().square().matrix();
        uy_.noalias() = dec_.eigenvectors.transpose() * ds.Y;
        uf_.noalias() = dec_.eigenvectors.transpose() * ds.f_train;
        if (with_noise_stderr) {
            G_.noalias() = P_.transpose() * P_;
            G_ /= static_cast<double>(P_.rows());
        }
    }

    const SpectralDecomposition& decomposition() const { return dec_; }

    /// Predictions at the test points for labels Y (noisy) or f*(X) (noiseless).
    Eigen::VectorXd predictions(const FilterSpec& f, bool noiseless = false) const {
        const Eigen::VectorXd w = filter_weights(f, dec_);
        return predict_with(w, noiseless ? uf_ : uy_);
    }

    RiskEstimate evaluate(const FilterSpec& f) const {
        const Eigen::VectorXd w = filter_weights(f, dec_);
        const double n = static_cast<double>(dec_.n);
        RiskEstimate r = excess_risk_mc(*ds_, predict_with(w, uy_));
        const Eigen::VectorXd bias = predict_with(w, uf_) - ds_->f_test;
        r.bias_sq = bias.squaredNorm() / static_cast<double>(bias.size());
        const Eigen::VectorXd w2 = (w / n).array().square().matrix();
        const double sigma2 = ds_->sigma * ds_->sigma;
        r.variance = sigma2 * (P_sq_ * w2).mean();
        if (G_.size() > 0) {
            // risk - bias^2 = (2/T) b^T A e + (1/T) e^T A^T A e with A = P diag(w/n) U^T and e ~ N(0, sigma^2 I).
            const double T = static_cast<double>(P_.rows());
            const Eigen::VectorXd wn = w / n;
            const Eigen::VectorXd m = (wn.array() * (P_.transpose() * bias).array()).matrix() / T;
            const Eigen::MatrixXd B = wn.asDiagonal() * G_ * wn.asDiagonal();
            const double var = 4.0 * sigma2 * m.squaredNorm() + 2.0 * sigma2 * sigma2 * B.squaredNorm();
            r.noise_stderr = std::sqrt(var);
        }
        r.lambda = f.lambda();
        r.filter_id = f.id();
        r.kernel_id = kernel_id_;
        return r;
    }

private:
    Eigen::VectorXd predict_with(const Eigen::VectorXd& w, const Eigen::VectorXd& coeffs) const {
        return P_ * (w.array() * coeffs.array()).matrix() / static_cast<double>(dec_.n);
    }

    const Dataset* ds_;
    std::string kernel_id_;
    SpectralDecomposition dec_;
    Eigen::MatrixXd P_;
    Eigen::MatrixXd P_sq_;
    Eigen::MatrixXd G_;
    Eigen::VectorXd uy_, uf_;
};

/// Exact conditional bias^2 and variance (given X) plus the noisy-run excess risk.
inline RiskEstimate bias_variance_exact(const KernelSpec& kernel, const FilterSpec& f, const Dataset& ds) {
    return SpectralRiskEvaluator(kernel, ds, true).evaluate(f);
}

/// Diagonal sequence model z_j = f_j + xi_j, xi_j ~ N(0, sigma^2/n), grouped in blocks of equal eigenvalue.
struct SequenceBlock {
    double eigenvalue;     ///< lambda_j shared by the block
    double multiplicity;   ///< number of modes in the block
    double signal_energy;  ///< sum of f_j^2 over the block
};

struct SequenceModelSpec {
    std::vector<SequenceBlock> blocks;  ///< eigenvalues nonincreasing
    double noise_var = 0.0;             ///< sigma^2 / n
    FilterSpec filter = FilterSpec::krr(1.0);
    double tail_mass = 0.0;             ///< eigenvalue mass dropped by truncation

    /// One block per mode.
    static SequenceModelSpec from_modes(const std::vector<double>& eigenvalues, const std::vector<double>& signal,
                                        double noise_var, const FilterSpec& filter) {
        if (eigenvalues.size() != signal.size()) throw std::invalid_argument("SequenceModelSpec: size mismatch");
        SequenceModelSpec s;
        s.noise_var = noise_var;
        s.filter = filter;
        for (std::size_t j = 0; j < eigenvalues.size(); ++j) s.blocks.push_back({eigenvalues[j], 1.0, signal[j] * signal[j]});
        return s;
    }

    /// Blocks from a per-degree spectrum with per-degree signal energies.
    static SequenceModelSpec from_structure(const EigenStructure& es, const std::vector<double>& energy,
                                            double sigma, double n, const FilterSpec& filter) {
        if (energy.size() != es.mu.size()) throw std::invalid_argument("SequenceModelSpec: energy size mismatch");
        SequenceModelSpec s;
        s.noise_var = sigma * sigma / n;
        s.filter = filter;
        s.tail_mass = es.trace_tail;
        for (std::size_t k = 0; k < es.mu.size(); ++k) s.blocks.push_back({es.mu[k], es.multiplicity[k], energy[k]});
        std::stable_sort(s.blocks.begin(), s.blocks.end(),
                         [](const SequenceBlock& a, const SequenceBlock& b) { return a.eigenvalue > b.eigenvalue; });
        return s;
    }
};

/// sigma^2/n sum_j (lambda_j phi(lambda_j))^2 + sum_j (psi(lambda_j) f_j)^2.
inline double sequence_risk_exact(const SequenceModelSpec& spec) {
    if (spec.filter.lambda() == 0.0)
        throw std::domain_error("sequence_risk_exact: lambda = 0 (variance series diverges)");
    double var = 0.0, bias = 0.0;
    for (const auto& b : spec.blocks) {
        if (b.eigenvalue < 0.0) throw std::invalid_argument("sequence_risk_exact: negative eigenvalue");
        if (b.multiplicity <= 0.0) continue;
        const double shrink = b.eigenvalue * spec.filter.phi_nonneg(b.eigenvalue);
        const double psi = spec.filter.psi(b.eigenvalue);
        var += b.multiplicity * shrink * shrink;
        bias += psi * psi * b.signal_energy;
    }
    return spec.noise_var * var + bias;
}

struct MonteCarloValue {
    double mean = 0.0;
    double stderr_ = 0.0;
};

/// Monte-Carlo estimate of E sum_j (f_hat_j - f_j)^2 for a per-mode sequence model (unit multiplicities),
/// with f_j = +sqrt(signal_energy).
inline MonteCarloValue sequence_risk_mc(const SequenceModelSpec& spec, int draws, RngStream& stream) {
    if (draws < 2) throw std::invalid_argument("sequence_risk_mc: draws must be >= 2");
    std::vector<double> shrink, f;
    for (const auto& b : spec.blocks) {
        if (b.multiplicity != 1.0) throw std::invalid_argument("sequence_risk_mc: requires unit multiplicities");
        shrink.push_back(b.eigenvalue * spec.filter.phi_nonneg(b.eigenvalue));
        f.push_back(std::sqrt(b.signal_energy));
    }
    const double sd = std::sqrt(spec.noise_var);
    double sum = 0.0, sum_sq = 0.0;
    for (int r = 0; r < draws; ++r) {
        double loss = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            const double z = f[j] + sd * stream.normal();
            const double e = shrink[j] * z - f[j];
            loss += e * e;
        }
        sum += loss;
        sum_sq += loss * loss;
    }
    MonteCarloValue out;
    out.mean = sum / draws;
    out.stderr_ = std::sqrt(std::max(0.0, sum_sq / draws - out.mean * out.mean) / (draws - 1.0));
    return out;
}

/// Eigenvalue-block diagnostics of a kernel matrix against the per-degree prediction.
struct SpectralBlockReport {
    std::vector<double> eigenvalues;     ///< eigenvalues of K, descending
    int ell = 0;
    std::vector<Eigen::Index> block_sizes;  ///< N(d, k) for k <= ell, then the bulk
    std::vector<double> block_mean;      ///< measured mean of each block
    std::vector<double> block_predicted; ///< n mu_k + kappa_1 for k <= ell, kappa_1 for the bulk
    std::vector<double> gap_ratio;       ///< min of block k over max of block k+1
    double kappa1 = 0.0;                 ///< sum_{k > ell} mu_k N(d, k)
    double bulk_mean = 0.0;
    double bulk_spread = 0.0;            ///< (max - min) / mean over the bulk
    double bulk_quantile_spread = 0.0;   ///< (q95 - q5) / mean over the bulk
    double kappa1_rel_error = 0.0;       ///< |kappa1 - bulk_mean| / bulk_mean
};

inline SpectralBlockReport spectral_block_report(const GramMatrix& G, const EigenStructure& es, int ell) {
    const Eigen::Index n = G.K.rows();
    if (ell < 0 || ell >= es.k_max) throw std::invalid_argument("spectral_block_report: ell out of range");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(G.K, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("spectral_block_report: eigensolver failed");
    SpectralBlockReport r;
    r.ell = ell;
    r.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    std::reverse(r.eigenvalues.begin(), r.eigenvalues.end());
    double head = 0.0;
    for (int k = 0; k <= ell; ++k) head += es.mu[static_cast<std::size_t>(k)] * es.multiplicity[static_cast<std::size_t>(k)];
    r.kappa1 = es.trace - head;
    Eigen::Index start = 0;
    for (int k = 0; k <= ell + 1; ++k) {
        const bool bulk = k == ell + 1;
        const Eigen::Index size =
            bulk ? n - start : std::min<Eigen::Index>(static_cast<Eigen::Index>(es.multiplicity[static_cast<std::size_t>(k)]), n - start);
        if (size <= 0) throw std::invalid_argument("spectral_block_report: n too small for the predicted blocks");
        r.block_sizes.push_back(size);
        double sum = 0.0;
        for (Eigen::Index i = start; i < start + size; ++i) sum += r.eigenvalues[static_cast<std::size_t>(i)];
        r.block_mean.push_back(sum / static_cast<double>(size));
        r.block_predicted.push_back(bulk ? r.kappa1 : static_cast<double>(n) * es.mu[static_cast<std::size_t>(k)] + r.kappa1);
        if (k > 0) {
            const double prev_min = r.eigenvalues[static_cast<std::size_t>(start - 1)];
            const double cur_max = r.eigenvalues[static_cast<std::size_t>(start)];
            r.gap_ratio.push_back(cur_max > 0.0 ? prev_min / cur_max : std::numeric_limits<double>::infinity());
        }
        start += size;
    }
    const auto bulk_begin = r.eigenvalues.begin() + (n - r.block_sizes.back());
    std::vector<double> bulk(bulk_begin, r.eigenvalues.end());
    std::sort(bulk.begin(), bulk.end());
    r.bulk_mean = r.block_mean.back();
    r.bulk_spread = (bulk.back() - bulk.front()) / r.bulk_mean;
    const auto q = [&](double p) { return bulk[static_cast<std::size_t>(p * static_cast<double>(bulk.size() - 1))]; };
    r.bulk_quantile_spread = (q(0.95) - q(0.05)) / r.bulk_mean;
    r.kappa1_rel_error = std::abs(r.kappa1 - r.bulk_mean) / r.bulk_mean;
    return r;
}

}  // namespace speclab
