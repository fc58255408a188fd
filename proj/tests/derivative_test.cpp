#include <cmath>

#include <gtest/gtest.h>

#include "seqcert/derivative.hpp"

using namespace seqcert;

namespace {

DerivOptions numeric() {
    DerivOptions o;
    o.prefer_analytic = false;
    return o;
}

} // namespace

TEST(DirDeriv, AbsKinkAtZero) {
    const auto d = dir_deriv(l1_norm(), Point({1.0}), basis_vector(2), numeric());
    EXPECT_FALSE(d.exists);
    EXPECT_NEAR(d.left, -1.0, 1e-9);
    EXPECT_NEAR(d.right, 1.0, 1e-9);
    EXPECT_EQ(d.method, DerivMethod::Numeric);
}

TEST(DirDeriv, SmoothQuadratic) {
    // f = sum 0.5^n x_n^2 at e_1, along e_1: 2 * 0.5 = 1.
    const auto f = separable(TailRule::geometric(1.0, 0.5), ScalarConvex::square());
    const auto d = dir_deriv(f, basis_vector(1), basis_vector(1), numeric());
    ASSERT_TRUE(d.exists);
    EXPECT_NEAR(d.value, 1.0, 1e-8);
    EXPECT_FALSE(d.quotients_log.empty());
}

TEST(DirDeriv, AnalyticPathWhenAvailable) {
    const auto f = separable(TailRule::geometric(1.0, 0.5), ScalarConvex::square());
    const auto d = dir_deriv(f, basis_vector(1), basis_vector(1));
    EXPECT_EQ(d.method, DerivMethod::Analytic);
    EXPECT_EQ(d.value, 1.0);
}

TEST(DirDeriv, LimsupAlongOnes) {
    const Point ones({}, TailRule::constant(1.0));
    const auto d = dir_deriv(limsup_seminorm(), Point::zero(), ones, numeric());
    EXPECT_FALSE(d.exists);
    EXPECT_NEAR(d.left, -1.0, 1e-7);
    EXPECT_NEAR(d.right, 1.0, 1e-7);
}

TEST(DirDeriv, LimsupProfileExistsAtRandomPoints) {
    const std::vector<Point> pts{Point::zero(), Point({}, TailRule::constant(1.0)),
                                 Point({2.0, -1.0}, TailRule::harmonic(3.0))};
    for (const auto& x : pts) {
        const auto prof = dir_deriv_profile(limsup_seminorm(), x, 16, numeric());
        for (const auto& d : prof) {
            EXPECT_TRUE(d.exists);
            EXPECT_NEAR(d.value, 0.0, 1e-12);
        }
    }
}

TEST(DirDeriv, NegSqrtBoundaryIsMinusInfinity) {
    const auto f = separable(TailRule::constant(1.0), ScalarConvex::neg_sqrt(1.0));
    const auto a = analytic_dir_deriv(f, Point::zero(), 1);
    EXPECT_TRUE(std::isinf(a.right));
    EXPECT_LT(a.right, 0.0);
}

TEST(DirDeriv, ZeroDirectionIsZero) {
    const auto d = dir_deriv(l1_norm(), Point::zero(), Point::zero(), numeric());
    EXPECT_TRUE(d.exists);
    EXPECT_EQ(d.value, 0.0);
}

TEST(DirDeriv, OneSidedDomainThrows) {
    const auto f = separable(TailRule::constant(1.0), ScalarConvex::neg_sqrt(1.0));
    EXPECT_THROW(dir_deriv(f, Point::zero(), basis_vector(1), numeric()), DomainLimited);
}

TEST(DirDeriv, PositiveHomogeneity) {
    const auto f = separable(TailRule::geometric(1.0, 0.5), ScalarConvex::square());
    const Point x({0.3, -0.2}), h({1.0, 2.0});
    const auto d1 = dir_deriv(f, x, h, numeric()), d3 = dir_deriv(f, x, 3.0 * h, numeric());
    EXPECT_NEAR(d3.value, 3.0 * d1.value, 1e-8);
}
