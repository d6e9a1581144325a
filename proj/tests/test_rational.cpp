#include <gtest/gtest.h>

#include <limits>

#include "speclab/rational.hpp"

using speclab::Rational;

TEST(Rational, NormalizesSignAndGcd) {
    const Rational r(6, -8);
    EXPECT_EQ(r.num(), -3);
    EXPECT_EQ(r.den(), 4);
    EXPECT_EQ(Rational(0, 5), Rational(0));
    EXPECT_THROW(Rational(1, 0), std::invalid_argument);
}

TEST(Rational, DecimalInputsAreExact) {
    EXPECT_EQ(Rational::from_double(1.5), Rational(3, 2));
    EXPECT_EQ(Rational::from_double(0.1), Rational(1, 10));
    EXPECT_EQ(Rational::from_double(2.7), Rational(27, 10));
    EXPECT_EQ(Rational::from_double(1e-5), Rational(1, 100000));
    EXPECT_EQ(Rational::from_double(-0.125), Rational(-1, 8));
    EXPECT_EQ(Rational::parse("3/2"), Rational(3, 2));
    EXPECT_EQ(Rational::parse("-2.5e1"), Rational(-25));
    EXPECT_EQ(Rational::parse("inf"), Rational::infinity());
    EXPECT_THROW(Rational::parse("1.2.3"), std::invalid_argument);
    EXPECT_THROW(Rational::parse("abc"), std::invalid_argument);
}

TEST(Rational, KnifeEdgeBoundaryIsExact) {
    // 0.1 + 0.2 == 0.3 must hold exactly for exponent case dispatch.
    EXPECT_EQ(Rational::from_double(0.1) + Rational::from_double(0.2), Rational::from_double(0.3));
    // gamma == p (s + 1) with gamma = 3, s = 0.5, p = 2.
    EXPECT_EQ(Rational(2) * (Rational::from_double(0.5) + Rational(1)), Rational(3));
}

TEST(Rational, Arithmetic) {
    EXPECT_EQ(Rational(1, 2) + Rational(1, 3), Rational(5, 6));
    EXPECT_EQ(Rational(1, 2) - Rational(1, 3), Rational(1, 6));
    EXPECT_EQ(Rational(2, 3) * Rational(9, 4), Rational(3, 2));
    EXPECT_EQ(Rational(2, 3) / Rational(4, 9), Rational(3, 2));
    EXPECT_THROW(Rational(1) / Rational(0), std::domain_error);
}

TEST(Rational, FloorAndCeil) {
    EXPECT_EQ(Rational(7, 2).floor(), 3);
    EXPECT_EQ(Rational(-7, 2).floor(), -4);
    EXPECT_EQ(Rational(-4).floor(), -4);
    EXPECT_EQ(Rational(7, 2).ceil(), 4);
    EXPECT_EQ(Rational(-7, 2).ceil(), -3);
    EXPECT_THROW(Rational::infinity().floor(), std::domain_error);
}

TEST(Rational, InfinityOrderingAndArithmetic) {
    const Rational inf = Rational::infinity();
    EXPECT_LT(Rational(1000000), inf);
    EXPECT_LT(Rational::negative_infinity(), Rational(-1000000));
    EXPECT_EQ(inf + Rational(3), inf);
    EXPECT_EQ(Rational(-2) * inf, Rational::negative_infinity());
    EXPECT_EQ(Rational(5) / inf, Rational(0));
    EXPECT_THROW(inf - inf, std::domain_error);
    EXPECT_THROW(Rational(0) * inf, std::domain_error);
    EXPECT_TRUE(std::isinf(inf.to_double()));
}

TEST(Rational, OverflowIsSignaled) {
    const Rational big(std::numeric_limits<std::int64_t>::max() / 2);
    EXPECT_THROW(big * Rational(4), std::overflow_error);
    EXPECT_THROW(Rational::parse("1e40"), std::overflow_error);
}

TEST(Rational, StringForm) {
    EXPECT_EQ(Rational(-3, 2).str(), "-3/2");
    EXPECT_EQ(Rational(4).str(), "4");
    EXPECT_EQ(Rational::negative_infinity().str(), "-inf");
}
