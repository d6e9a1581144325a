#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "speclab/kernel.hpp"

using namespace speclab;

namespace {

/// Sup-norm error of the least-squares Chebyshev fit of degree m to Phi on a fine grid.
double chebyshev_fit_error(const KernelSpec& k, int m) {
    const int n = 2001;
    Eigen::MatrixXd A(n, m + 1);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        const double t = std::cos(std::numbers::pi * (i + 0.5) / n);
        for (int j = 0; j <= m; ++j) A(i, j) = std::cos(j * std::acos(t));
        y(i) = k.phi(t);
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
    double worst = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double t = -1.0 + i / 2000.0;
        double s = 0.0;
        for (int j = 0; j <= m; ++j) s += c(j) * std::cos(j * std::acos(std::clamp(t, -1.0, 1.0)));
        worst = std::max(worst, std::abs(s - k.phi(t)));
    }
    return worst;
}

}  // namespace

TEST(KernelProfiles, KnownValues) {
    const auto ntk = KernelSpec::ntk();
    EXPECT_NEAR(ntk.phi(1.0), 1.0, 1e-15);
    EXPECT_NEAR(ntk.phi(0.0), 1.0 / (2.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(ntk.phi(-1.0), 0.0, 1e-15);
    EXPECT_NEAR(ntk.phi(0.5), (std::sqrt(0.75) + 2.0 * (std::numbers::pi - std::acos(0.5)) * 0.5) / (2.0 * std::numbers::pi), 1e-15);
    const auto rbf = KernelSpec::rbf();
    EXPECT_DOUBLE_EQ(rbf.phi(1.0), 1.0);
    EXPECT_DOUBLE_EQ(rbf.phi(0.0), std::exp(-1.0));
    const auto p = KernelSpec::power_series({1.0, 2.0, 3.0});
    EXPECT_DOUBLE_EQ(p.phi(0.5), 1.0 + 1.0 + 0.75);
    EXPECT_DOUBLE_EQ(p.k_max(), 6.0);
    EXPECT_DOUBLE_EQ(p.tail_bound(), 6.0);
}

TEST(KernelProfiles, DomainAndValidation) {
    EXPECT_THROW(KernelSpec::rbf().phi(1.01), std::domain_error);
    EXPECT_NO_THROW(KernelSpec::rbf().phi(-1.0 - 1e-13));
    EXPECT_THROW(KernelSpec::power_series({}), std::invalid_argument);
    EXPECT_THROW(KernelSpec::power_series({1.0, -0.5}), std::invalid_argument);
    EXPECT_THROW(KernelSpec::power_series({1.0, 1.0}, 1.5), std::invalid_argument);
    EXPECT_DOUBLE_EQ(KernelSpec::power_series({1.0, 1.0}, 3.0).tail_bound(), 3.0);
}

TEST(KernelProfiles, ParseRoundTrip) {
    EXPECT_EQ(parse_kernel("ntk").kind(), KernelKind::ntk);
    EXPECT_EQ(parse_kernel("rbf").kind(), KernelKind::rbf);
    const auto p = parse_kernel("powser:0.5,0.25,0.125");
    EXPECT_EQ(p.coefficients(), (std::vector<double>{0.5, 0.25, 0.125}));
    EXPECT_EQ(p.id(), "powser:0.5,0.25,0.125");
    EXPECT_EQ(parse_kernel(p.id()).coefficients(), p.coefficients());
    EXPECT_THROW(parse_kernel("laplace"), std::invalid_argument);
    EXPECT_THROW(parse_kernel("powser:1,x"), std::invalid_argument);
}

TEST(KernelProfiles, NtkIsWellApproximatedByPolynomials) {
    // The NTK profile has a sqrt(1 - t^2) edge singularity, so polynomial fits converge slowly.
    const auto ntk = KernelSpec::ntk();
    const double e5 = chebyshev_fit_error(ntk, 5);
    const double e10 = chebyshev_fit_error(ntk, 10);
    const double e20 = chebyshev_fit_error(ntk, 20);
    EXPECT_LT(e10, e5);
    EXPECT_LT(e20, e10);
    EXPECT_LT(e20, 1e-2);
}

TEST(Gram, SinglePointAndOrthogonalPoints) {
    SpherePointSet one;
    one.X = Eigen::MatrixXd::Zero(1, 4);
    one.X(0, 0) = 1.0;
    EXPECT_DOUBLE_EQ(gram(KernelSpec::rbf(), one).K(0, 0), 1.0);

    SpherePointSet e;
    e.X = Eigen::MatrixXd::Identity(3, 3);
    const auto G = gram(KernelSpec::rbf(), e).K;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(G(i, j), i == j ? 1.0 : std::exp(-1.0));
    SpherePointSet empty;
    empty.X.resize(0, 3);
    EXPECT_THROW(gram(KernelSpec::rbf(), empty), std::invalid_argument);
}

TEST(Gram, SymmetricPositiveSemidefinite) {
    RngStream s(11);
    const auto X = sample_sphere(120, 6, s);
    for (const auto& k : {KernelSpec::ntk(), KernelSpec::rbf(), KernelSpec::power_series({0.1, 0.5, 0.4})}) {
        const auto G = gram(k, X);
        EXPECT_EQ(G.K, G.K.transpose());
        EXPECT_EQ(G.kernel_id, k.id());
        EXPECT_EQ(G.seed, X.seed);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G.K, Eigen::EigenvaluesOnly);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * es.eigenvalues().maxCoeff()) << k.id();
    }
}

TEST(Gram, RotationInvariance) {
    RngStream s(12);
    const auto X = sample_sphere(40, 5, s);
    RngStream r(13);
    Eigen::MatrixXd M(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) M(i, j) = r.normal();
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(M).householderQ();
    SpherePointSet Y{X.X * Q, X.seed};
    for (const auto& k : {KernelSpec::ntk(), KernelSpec::rbf()})
        EXPECT_LT((gram(k, X).K - gram(k, Y).K).cwiseAbs().maxCoeff(), 1e-10) << k.id();
}

TEST(Gram, ConstantKernelAndCrossConsistency) {
    RngStream s(14);
    const auto X = sample_sphere(15, 4, s);
    const auto c = gram(KernelSpec::power_series({2.5}), X).K;
    EXPECT_TRUE((c.array() == 2.5).all());
    const auto k = KernelSpec::ntk();
    // Off the diagonal both paths evaluate the same clamped inner products; on it, gram uses Phi(1)
    // exactly while the NTK square-root term amplifies the 1e-16 norm error of the sampled points.
    Eigen::MatrixXd diff = cross_kernel(k, X, X) - gram(k, X).K;
    EXPECT_LT(diff.diagonal().cwiseAbs().maxCoeff(), 1e-7);
    diff.diagonal().setZero();
    EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((cross_kernel(KernelSpec::rbf(), X, X) - gram(KernelSpec::rbf(), X).K).cwiseAbs().maxCoeff(), 1e-14);
    RngStream t(15);
    const auto T = sample_sphere(7, 4, t);
    const Eigen::MatrixXd C = cross_kernel(k, X, T);
    EXPECT_EQ(C.rows(), 7);
    EXPECT_EQ(C.cols(), 15);
    EXPECT_DOUBLE_EQ(C(3, 9), k.phi(T.X.row(3).dot(X.X.row(9))));
    RngStream u(16);
    EXPECT_THROW(cross_kernel(k, X, sample_sphere(3, 5, u)), std::invalid_argument);
}

TEST(EigenStructure, PowerSeriesTraceIsCaptured) {
    // Polynomial kernel of degree 3 has no mass beyond degree 3.
    const auto es = eigen_structure(KernelSpec::power_series({0.2, 0.3, 0.3, 0.2}), 9, 6);
    EXPECT_NEAR(es.trace, 1.0, 1e-15);
    EXPECT_NEAR(es.trace_tail, 0.0, 1e-9);
    for (int k = 4; k <= 6; ++k) EXPECT_NEAR(es.mu[static_cast<std::size_t>(k)], 0.0, 1e-12);
    EXPECT_NEAR(es.tail_sum(3), 0.0, 1e-9);
}
