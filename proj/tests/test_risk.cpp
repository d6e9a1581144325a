#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "speclab/risk.hpp"
#include "speclab/theory.hpp"

using namespace speclab;

namespace {

Dataset make_dataset(const KernelSpec& k, int n, int d, double s, double sigma, int n_test, std::uint64_t seed) {
    RngStream a(seed);
    const auto f = build_target(k, TargetSpec{s, sigma, n_test}, sample_anchors(d, a), d);
    return generate_dataset(f, n, d, sigma, n_test, {seed + 1, seed + 2, seed + 3});
}

}  // namespace

TEST(ExcessRisk, Definitions) {
    const auto ds = make_dataset(KernelSpec::rbf(), 20, 6, 1.0, 1.0, 50, 1);
    EXPECT_EQ(excess_risk_mc(ds, ds.f_test).excess_risk, 0.0);
    EXPECT_EQ(excess_risk_mc(ds, ds.f_test).mc_stderr, 0.0);
    const auto zero = excess_risk_mc(ds, Eigen::VectorXd::Zero(50));
    EXPECT_NEAR(zero.excess_risk, ds.f_test.squaredNorm() / 50.0, 1e-14);
    const Eigen::ArrayXd sq = ds.f_test.array().square();
    const double sd = std::sqrt((sq - sq.mean()).square().sum() / 49.0);
    EXPECT_NEAR(zero.mc_stderr, sd / std::sqrt(50.0), 1e-14);
    EXPECT_THROW(excess_risk_mc(ds, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(ExcessRisk, HeavyRegularizationRecoversSignalNorm) {
    const auto ds = make_dataset(KernelSpec::rbf(), 50, 8, 1.0, 1.0, 200, 2);
    const auto r = SpectralRiskEvaluator(KernelSpec::rbf(), ds).evaluate(FilterSpec::krr(1e6));
    const double norm = ds.f_test.squaredNorm() / 200.0;
    EXPECT_NEAR(r.excess_risk / norm, 1.0, 1e-2);
}

TEST(BiasVariance, NoiselessHasZeroVariance) {
    const auto ds = make_dataset(KernelSpec::ntk(), 40, 6, 1.5, 0.0, 100, 3);
    const auto r = bias_variance_exact(KernelSpec::ntk(), FilterSpec::gradient_flow(0.05), ds);
    EXPECT_EQ(r.variance, 0.0);
    EXPECT_NEAR(r.excess_risk, r.bias_sq, 1e-14);
}

TEST(BiasVariance, SinglePointClosedForm) {
    const int d = 5;
    auto ds = make_dataset(KernelSpec::rbf(), 1, d, 1.0, 0.7, 30, 4);
    const double lambda = 0.3;
    const auto r = bias_variance_exact(KernelSpec::rbf(), FilterSpec::krr(lambda), ds);
    double var = 0.0;
    for (Eigen::Index i = 0; i < 30; ++i) {
        const double k = std::exp(ds.X_test.X.row(i).dot(ds.X.X.row(0)) - 1.0);
        var += 0.49 * std::pow(k / (1.0 + lambda), 2);
    }
    EXPECT_NEAR(r.variance, var / 30.0, 1e-14);
}

TEST(BiasVariance, VarianceMatchesNoiseMonteCarlo) {
    const auto kernel = KernelSpec::rbf();
    const auto ds = make_dataset(kernel, 100, 10, 1.5, 1.0, 100, 5);
    const auto f = FilterSpec::krr(0.01);
    const auto exact = bias_variance_exact(kernel, f, ds);
    const SpectralRiskEvaluator ev(kernel, ds);
    const Eigen::VectorXd mean_pred = ev.predictions(f, true);
    const auto dec = decompose(gram(kernel, ds.X));
    const Eigen::MatrixXd C = cross_kernel(kernel, ds.X, ds.X_test);
    RngStream noise(6);
    const int draws = 200;
    std::vector<double> v(draws);
    for (int r = 0; r < draws; ++r) {
        Eigen::VectorXd Y = ds.f_train;
        for (Eigen::Index i = 0; i < Y.size(); ++i) Y(i) += noise.normal();
        const Eigen::VectorXd pred = C * matrix_filter_apply(f, dec, Y) / 100.0;
        v[static_cast<std::size_t>(r)] = (pred - mean_pred).squaredNorm() / 100.0;
    }
    double m = 0.0, m2 = 0.0;
    for (double x : v) {
        m += x;
        m2 += x * x;
    }
    m /= draws;
    const double se = std::sqrt((m2 / draws - m * m) / (draws - 1.0));
    EXPECT_LT(std::abs(m - exact.variance), 3.0 * se) << "mc=" << m << " exact=" << exact.variance;
}

TEST(BiasVariance, DecompositionIdentity) {
    int cell = 0;
    for (const auto& k : {KernelSpec::rbf(), KernelSpec::ntk()})
        for (int n : {120, 250})
            for (const auto& f : {FilterSpec::krr(0.02), FilterSpec::gradient_flow(0.02), FilterSpec::iterated_ridge(2, 0.05)}) {
                const auto ds = make_dataset(k, n, 8, 1.5, 1.0, 1000, 100 + static_cast<std::uint64_t>(cell++) * 10);
                const auto r = bias_variance_exact(k, f, ds);
                ASSERT_TRUE(r.noise_stderr.has_value());
                EXPECT_GE(r.bias_sq, 0.0);
                EXPECT_GE(r.variance, 0.0);
                EXPECT_LE(std::abs(r.excess_risk - r.bias_sq - r.variance), 3.0 * r.combined_stderr())
                    << k.id() << " n=" << n << " " << f.id();
            }
}

TEST(BiasVariance, MonotoneInLambda) {
    const auto kernel = KernelSpec::rbf();
    const auto ds = make_dataset(kernel, 150, 8, 1.0, 1.0, 300, 7);
    const SpectralRiskEvaluator ev(kernel, ds);
    double prev_bias = -1.0, prev_var = std::numeric_limits<double>::infinity();
    for (double lambda : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0}) {
        const auto r = ev.evaluate(FilterSpec::krr(lambda));
        EXPECT_GE(r.bias_sq, prev_bias) << lambda;
        EXPECT_LE(r.variance, prev_var) << lambda;
        prev_bias = r.bias_sq;
        prev_var = r.variance;
    }
}

TEST(BiasVariance, EvaluatorReuseMatchesDirectEstimator) {
    const auto kernel = KernelSpec::ntk();
    const auto ds = make_dataset(kernel, 60, 7, 1.0, 1.0, 40, 8);
    const SpectralRiskEvaluator ev(kernel, ds);
    for (const auto& f : {FilterSpec::krr(0.1), FilterSpec::gradient_descent(0.5, 0.05)}) {
        const Eigen::VectorXd direct = spectral_estimator(kernel, f, ds.X, ds.Y, ds.X_test);
        EXPECT_LT((ev.predictions(f) - direct).cwiseAbs().maxCoeff(), 1e-12) << f.id();
    }
}

TEST(SequenceModel, ClosedFormExamples) {
    for (double lambda : {0.1, 1.0, 3.0}) {
        const auto spec = SequenceModelSpec::from_modes({1.0}, {1.0}, 0.0, FilterSpec::krr(lambda));
        EXPECT_NEAR(sequence_risk_exact(spec), std::pow(lambda / (1.0 + lambda), 2), 1e-15);
    }
    EXPECT_NEAR(sequence_risk_exact(SequenceModelSpec::from_modes({1.0}, {0.0}, 1.0, FilterSpec::krr(1.0))), 0.25, 1e-15);
    EXPECT_THROW(sequence_risk_exact(SequenceModelSpec::from_modes({1.0}, {1.0}, 1.0, FilterSpec::krr(0.0))),
                 std::domain_error);
    EXPECT_THROW(SequenceModelSpec::from_modes({1.0, 0.5}, {1.0}, 1.0, FilterSpec::krr(1.0)), std::invalid_argument);
}

TEST(SequenceModel, MatchesMonteCarlo) {
    std::vector<double> ev, f;
    for (int j = 1; j <= 20; ++j) {
        ev.push_back(1.0 / (j * j));
        f.push_back(1.0 / j);
    }
    for (const auto& filter : {FilterSpec::krr(0.05), FilterSpec::gradient_flow(0.05), FilterSpec::iterated_ridge(3, 0.02)}) {
        const auto spec = SequenceModelSpec::from_modes(ev, f, 0.01, filter);
        RngStream s(9);
        const auto mc = sequence_risk_mc(spec, 100000, s);
        const double exact = sequence_risk_exact(spec);
        EXPECT_LT(std::abs(mc.mean - exact) / exact, 0.02) << filter.id();
    }
}

TEST(SequenceModel, NonincreasingInSampleSize) {
    const auto es = eigen_structure(KernelSpec::rbf(), 30, 6);
    std::vector<double> energy;
    for (double mu : es.mu) energy.push_back(std::pow(mu, 1.5));
    double prev = std::numeric_limits<double>::infinity();
    for (double n : {100.0, 300.0, 1000.0, 3000.0}) {
        const double r = sequence_risk_exact(SequenceModelSpec::from_structure(es, energy, 1.0, n, FilterSpec::gradient_flow(0.01)));
        EXPECT_LE(r, prev);
        prev = r;
    }
}

TEST(SequenceModel, TruncatedMassIsSmall) {
    for (int d : {30, 60, 120}) {
        for (const auto& k : {KernelSpec::rbf(), KernelSpec::power_series({0.4, 0.3, 0.2, 0.1})}) {
            const auto es = eigen_structure(k, d, 12);
            EXPECT_LT(std::abs(es.trace_tail), 0.05 * es.trace) << k.id() << " d=" << d;
            const auto spec = SequenceModelSpec::from_structure(es, std::vector<double>(13, 0.0), 1.0, 100.0, FilterSpec::krr(0.1));
            for (std::size_t b = 1; b < spec.blocks.size(); ++b)
                EXPECT_LE(spec.blocks[b].eigenvalue, spec.blocks[b - 1].eigenvalue);
        }
    }
}

TEST(SequenceModel, IdealizedSlopeApproachesTheory) {
    // Idealized spectrum mu_k = d^{-k}, per-degree signal energy mu_k^s, n = d^gamma, lambda = d^{-u};
    // local slopes of log risk against log d.
    const double s = 1.0, gamma = 1.5, u = 0.5;
    const double zeta = sequence_exponent(RateQuery<double>{s, gamma, 1.0, u});
    std::vector<double> logs_d, logs_r;
    for (int d : {100, 400, 1600, 6400}) {
        const auto es = idealized_eigen_structure(d, 8);
        std::vector<double> energy;
        for (double mu : es.mu) energy.push_back(std::pow(mu, s));
        const double n = std::pow(static_cast<double>(d), gamma);
        const auto spec = SequenceModelSpec::from_structure(es, energy, 1.0, n, FilterSpec::krr(std::pow(d, -u)));
        logs_d.push_back(std::log(static_cast<double>(d)));
        logs_r.push_back(std::log(sequence_risk_exact(spec)));
    }
    std::vector<double> err;
    for (std::size_t i = 1; i < logs_d.size(); ++i)
        err.push_back(std::abs((logs_r[i] - logs_r[i - 1]) / (logs_d[i] - logs_d[i - 1]) - zeta));
    for (std::size_t i = 1; i < err.size(); ++i) EXPECT_LE(err[i], err[i - 1] + 1e-12);
    EXPECT_LT(err.back(), 0.1);
}

TEST(BlockReport, ConstantKernelIsRankOne) {
    RngStream s(10);
    const int n = 60, d = 10;
    const auto X = sample_sphere(n, d, s);
    const auto k = KernelSpec::power_series({1.0});
    const auto r = spectral_block_report(gram(k, X), eigen_structure(k, d, 2), 0);
    EXPECT_NEAR(r.eigenvalues[0], n, 1e-10);
    for (std::size_t i = 1; i < r.eigenvalues.size(); ++i) EXPECT_NEAR(r.eigenvalues[i], 0.0, 1e-10);
    EXPECT_NEAR(r.block_predicted[0], n, 1e-8);
    EXPECT_NEAR(r.kappa1, 0.0, 1e-8);
    EXPECT_EQ(r.block_sizes[0], 1);
    EXPECT_EQ(r.block_sizes[1], n - 1);
}

TEST(BlockReport, RbfBlocksSeparate) {
    RngStream s(11);
    const int n = 400, d = 20;
    const auto X = sample_sphere(n, d, s);
    const auto k = KernelSpec::rbf();
    const auto r = spectral_block_report(gram(k, X), eigen_structure(k, d, 6), 1);
    ASSERT_EQ(r.block_sizes.size(), 3u);
    EXPECT_EQ(r.block_sizes[0], 1);
    EXPECT_EQ(r.block_sizes[1], d);
    for (double g : r.gap_ratio) EXPECT_GT(g, 1.0);
    EXPECT_LT(std::abs(r.block_mean[0] - r.block_predicted[0]) / r.block_predicted[0], 0.2);
    EXPECT_THROW(spectral_block_report(gram(k, X), eigen_structure(k, d, 2), 2), std::invalid_argument);
}
