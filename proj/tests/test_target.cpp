#include <gtest/gtest.h>

#include <cmath>

#include "speclab/target.hpp"

using namespace speclab;

namespace {

/// Anchors e_1, e_2, e_3 in R^d.
AnchorSet orthogonal_anchors(int d) {
    AnchorSet a;
    a.xi = Eigen::MatrixXd::Zero(3, d);
    for (int i = 0; i < 3; ++i) a.xi(i, i) = 1.0;
    a.attempts = 1;
    return a;
}

}  // namespace

TEST(Anchors, ConstraintAlwaysHolds) {
    for (int d : {3, 5, 10, 50}) {
        RngStream s(static_cast<std::uint64_t>(d));
        for (int rep = 0; rep < 50; ++rep) {
            const auto a = sample_anchors(d, s);
            EXPECT_LE(a.coherence(), kAnchorCoherenceBound);
            EXPECT_GE(a.attempts, 1);
            for (int i = 0; i < 3; ++i) EXPECT_NEAR(a.xi.row(i).norm(), 1.0, 1e-14);
        }
    }
    RngStream s(1);
    EXPECT_THROW(sample_anchors(2, s), std::invalid_argument);
}

TEST(Anchors, DeterministicForFixedStream) {
    RngStream a(77), b(77);
    EXPECT_EQ(sample_anchors(20, a).xi, sample_anchors(20, b).xi);
}

TEST(Anchors, HighDimensionAcceptsImmediately) {
    int first_try = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        RngStream s(seed);
        first_try += sample_anchors(500, s).attempts == 1;
    }
    EXPECT_EQ(first_try, 100);
}

TEST(RegressionFunction, KernelSectionsAtAnchor) {
    const int d = 6;
    const RegressionFunction f(KernelSpec::rbf(), orthogonal_anchors(d), 1.0, d);
    EXPECT_EQ(f.mode(), TargetMode::kernel_sections);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
    x(0) = 1.0;
    EXPECT_NEAR(f(x), 1.0 + 2.0 * std::exp(-1.0), 1e-15);
}

TEST(RegressionFunction, GegenbauerMixAtOrthogonalPoint) {
    for (int d : {10, 100}) {
        for (double s : {0.5, 1.5, 3.0}) {
            const RegressionFunction f(KernelSpec::rbf(), orthogonal_anchors(d), s, d);
            EXPECT_EQ(f.mode(), TargetMode::gegenbauer_mix);
            Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
            x(5) = 1.0;
            const double expected = 3.0 * (1.0 - std::pow(static_cast<double>(d), 1.0 - s) / (d - 1.0));
            EXPECT_NEAR(f(x), expected, 1e-13) << "d=" << d << " s=" << s;
        }
    }
}

TEST(RegressionFunction, DegreeWeights) {
    const RegressionFunction f(KernelSpec::rbf(), orthogonal_anchors(100), 3.0, 100);
    EXPECT_DOUBLE_EQ(f.degree_weight(0), 1.0);
    EXPECT_NEAR(f.degree_weight(1), 1e-2, 1e-16);
    EXPECT_NEAR(f.degree_weight(2), 1e-4, 1e-18);
    EXPECT_THROW(RegressionFunction(KernelSpec::rbf(), orthogonal_anchors(5), 1.0, 6), std::invalid_argument);
}

TEST(RegressionFunction, ClosureMatchesBatch) {
    for (double s : {1.0, 1.5}) {
        RngStream a(3), p(4);
        const int d = 12;
        const auto f = build_target(KernelSpec::ntk(), TargetSpec{s, 1.0, 100}, sample_anchors(d, a), d);
        const auto X = sample_sphere(100, d, p);
        const Eigen::VectorXd batch = f.evaluate(X);
        for (Eigen::Index i = 0; i < X.size(); ++i) {
            const Eigen::VectorXd x = X.X.row(i).transpose();
            EXPECT_NEAR(f(x), batch(i), 1e-12);
        }
    }
}

TEST(SourceNorm, KernelSectionsBound) {
    const int d = 20;
    RngStream a(9);
    const auto anchors = sample_anchors(d, a);
    const RegressionFunction f(KernelSpec::rbf(), anchors, 1.0, d);
    const auto r = source_norm_report(KernelSpec::rbf(), f, d, 1.0);
    EXPECT_LE(r.norm_sq, 9.0);
    EXPECT_DOUBLE_EQ(r.norm_sq_bound, 9.0);
    // The degree 0..2 part of the RKHS norm cannot exceed the whole.
    EXPECT_LE(r.energy[0] + r.energy[1] + r.energy[2], r.norm_sq * (1.0 + 1e-8));
}

TEST(SourceNorm, DegreeZeroEnergy) {
    const int d = 15;
    const double s = 1.5;
    const RegressionFunction f(KernelSpec::rbf(), orthogonal_anchors(d), s, d);
    const auto r = source_norm_report(KernelSpec::rbf(), f, d, s);
    const double mu0 = eigen_structure(KernelSpec::rbf(), d, 0).mu[0];
    EXPECT_DOUBLE_EQ(r.bracket[0], 9.0);
    EXPECT_NEAR(r.energy[0], 9.0 * std::pow(mu0, -s), 1e-9 * r.energy[0]);
    EXPECT_DOUBLE_EQ(r.bracket[1], 3.0);
    EXPECT_NEAR(r.bracket[2], 3.0 + 6.0 * (-1.0 / (d - 1.0)), 1e-14);
}

TEST(SourceNorm, BracketsStayInBand) {
    for (int d : {11, 30, 100}) {
        RngStream a(static_cast<std::uint64_t>(d) * 7);
        for (int rep = 0; rep < 30; ++rep) {
            const RegressionFunction f(KernelSpec::rbf(), sample_anchors(d, a), 1.5, d);
            const auto r = source_norm_report(KernelSpec::rbf(), f, d, 1.5);
            for (double b : r.bracket) {
                EXPECT_GE(b, 0.1) << "d=" << d;
                EXPECT_LE(b, 9.0 + 1e-12) << "d=" << d;
            }
        }
    }
}

TEST(Dataset, NoiselessLabelsAreExact) {
    RngStream a(5);
    const int d = 8;
    const auto f = build_target(KernelSpec::rbf(), TargetSpec{1.5, 0.0, 20}, sample_anchors(d, a), d);
    const auto ds = generate_dataset(f, 50, d, 0.0, 20, {1, 2, 3});
    EXPECT_EQ(ds.Y, ds.f_train);
    EXPECT_EQ(ds.f_train, f.evaluate(ds.X));
    EXPECT_EQ(ds.f_test, f.evaluate(ds.X_test));
    EXPECT_EQ(ds.X_test.size(), 20);
    EXPECT_THROW(generate_dataset(f, 0, d, 1.0, 20, {1, 2, 3}), std::invalid_argument);
    EXPECT_THROW(generate_dataset(f, 10, d + 1, 1.0, 20, {1, 2, 3}), std::invalid_argument);
}

TEST(Dataset, NoiseVarianceAndDeterminism) {
    RngStream a(6);
    const int d = 8;
    const auto f = build_target(KernelSpec::rbf(), TargetSpec{1.0, 1.0, 10}, sample_anchors(d, a), d);
    const auto ds = generate_dataset(f, 10000, d, 1.0, 10, {11, 12, 13});
    const Eigen::ArrayXd e = (ds.Y - ds.f_train).array();
    const double var = (e - e.mean()).square().sum() / (e.size() - 1);
    EXPECT_GE(var, 0.94);
    EXPECT_LE(var, 1.06);
    const auto again = generate_dataset(f, 10000, d, 1.0, 10, {11, 12, 13});
    EXPECT_EQ(again.Y, ds.Y);
    EXPECT_EQ(again.X.X, ds.X.X);
}

TEST(Dataset, StreamsAreIndependent) {
    RngStream a(7);
    const int d = 8;
    const auto f = build_target(KernelSpec::rbf(), TargetSpec{1.0, 1.0, 10}, sample_anchors(d, a), d);
    const auto base = generate_dataset(f, 30, d, 1.0, 10, {21, 22, 23});
    const auto other_noise = generate_dataset(f, 30, d, 1.0, 10, {21, 99, 23});
    EXPECT_EQ(other_noise.X.X, base.X.X);
    EXPECT_EQ(other_noise.X_test.X, base.X_test.X);
    EXPECT_NE(other_noise.Y, base.Y);
    const auto other_points = generate_dataset(f, 30, d, 1.0, 10, {98, 22, 23});
    EXPECT_NE(other_points.X.X, base.X.X);
    EXPECT_LT(((other_points.Y - other_points.f_train) - (base.Y - base.f_train)).cwiseAbs().maxCoeff(), 1e-14);
}
