#include <gtest/gtest.h>

#include <cmath>
#include <ratio>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hsaw/sle.hpp"

using namespace hsaw;

TEST(Constants, ExactRationals) {
  static_assert(std::ratio_equal_v<SleConstants::boundary_exponent, std::ratio<5, 8>>);
  static_assert(std::ratio_equal_v<SleConstants::restriction_exponent, std::ratio<5, 8>>);
  static_assert(std::ratio_equal_v<SleConstants::stability_exponent, std::ratio<4, 3>>);
  EXPECT_EQ(SleConstants::b, 0.625);
  EXPECT_EQ(SleConstants::alpha, 0.625);
}

TEST(HalfPlane, Values) {
  EXPECT_EQ(h_halfplane(1.0), 1.0);
  EXPECT_NEAR(h_halfplane(2.0), 0.420448, 1e-6);
  EXPECT_NEAR(h_halfplane(2.0), std::pow(2.0, -1.25), 1e-15);
  for (double lambda : {0.5, 2.0, 7.3})
    for (double x : {0.3, 1.0, -2.5}) EXPECT_NEAR(h_halfplane(lambda * x), std::pow(lambda, -1.25) * h_halfplane(x), 1e-14);
  EXPECT_THROW(h_halfplane(0.0), std::domain_error);
}

TEST(StripWeight, Identities) {
  // [pi^2 / (4 cosh^2(pi x / 2))]^(5/8); at x = 0 this is (pi/2)^(5/4).
  EXPECT_NEAR(strip_weight(0.0), std::pow(kPi / 2.0, 1.25), 1e-14);
  for (double x : {0.1, 0.7, 3.0, 40.0}) {
    EXPECT_EQ(strip_weight(x), strip_weight(-x));
    EXPECT_NEAR(strip_weight(x) / strip_weight(0.0), std::pow(std::cosh(kPi * x / 2.0), -1.25), 1e-13);
  }
  EXPECT_GT(strip_weight(200.0), 0.0);
  EXPECT_TRUE(std::isfinite(strip_weight(1e4)));
}

TEST(Rho, NormalisationAndSymmetry) {
  EXPECT_NEAR(rho_shape_integral_quadrature(), rho_shape_integral_closed_form(), 1e-12);
  EXPECT_NEAR(rho_normalization(), 1.0 / rho_shape_integral_closed_form(), 1e-12);
  EXPECT_NEAR(rho_normalization(), 0.582, 5e-4);
  EXPECT_NEAR(rho(0.0), rho_normalization(), 0.0);
  QuadratureOptions opt;
  opt.abs_tol = 1e-13;
  double mass = 2.0 * rho_normalization() * rho_shape_tail_bound(30.0);
  for (double a = -30.0; a < 30.0; a += 1.0) mass += adaptive_simpson(rho, a, a + 1.0, opt);
  EXPECT_NEAR(mass, 1.0, 1e-9);
  for (double x = 0.0; x < 20.0; x += 0.37) {
    EXPECT_EQ(rho(x), rho(-x));
    EXPECT_GT(rho(x), 0.0);
  }
}

TEST(HullParams, SpecValues) {
  const HullParams h = hull_params(0.0, 1.0);
  EXPECT_NEAR(h.c, 1.00374, 1e-5);
  EXPECT_NEAR(h.a, 0.08659, 1e-5);
  for (double x : {-0.5, -2.0}) {
    const HullParams z = hull_params(x, 0.0);
    EXPECT_NEAR(z.a, 1.0 / (1.0 - std::exp(kPi * x)), 1e-12);
    EXPECT_NEAR(z.c, z.a, 1e-12);
  }
  const HullParams far = hull_params(0.3, 40.0);
  EXPECT_NEAR(far.c, 1.0, 1e-12);
  EXPECT_NEAR(far.a, 0.0, 1e-12);
  EXPECT_THROW(hull_params(1.0, 1.0), std::domain_error);
  EXPECT_THROW(hull_params(2.0, 1.0), std::domain_error);
}

TEST(HullParams, StableFormMatchesNaive) {
  using Big = boost::multiprecision::cpp_bin_float_50;
  const Big pi = boost::math::constants::pi<Big>();
  std::size_t compared = 0;
  for (double xi = 0.05; xi <= 20.0; xi += 0.35) {
    for (double x = -6.0; x < xi; x += 0.45) {
      const HullParams s = hull_params(x, xi);
      // 50-digit evaluation of the unsimplified formulas.
      const Big e = exp(pi * Big(xi)), ex = exp(pi * Big(x));
      const Big p = (e + 1) / (e - ex), q = (e - 1) / (e + ex);
      const double a = static_cast<double>((p - q) / 2), c = static_cast<double>((p + q) / 2);
      EXPECT_LT(std::abs(s.a - a) / a, 1e-10) << x << " " << xi;
      EXPECT_LT(std::abs(s.c - c) / c, 1e-10) << x << " " << xi;
      // The double-precision naive form loses a to cancellation once a << c.
      const HullParams n = hull_params_naive(x, xi);
      if (xi - x > 1e-3) {
        EXPECT_LT(std::abs(s.c - n.c) / n.c, 1e-10) << x << " " << xi;
      }
      if (a / c > 1e-5 && xi - x > 1e-3) {
        EXPECT_LT(std::abs(s.a - n.a) / n.a, 1e-10) << x << " " << xi;
        ++compared;
      }
    }
  }
  EXPECT_GT(compared, 200u);
  const HullParams big = hull_params(-3.0, 500.0);
  EXPECT_TRUE(std::isfinite(big.a) && std::isfinite(big.c));
  EXPECT_FALSE(std::isfinite(hull_params_naive(-3.0, 500.0).c));
}

TEST(Escape, Values) {
  EXPECT_NEAR(escape_probability(0.0, 1.0), 0.99534, 1e-5);
  const HullParams h = hull_params(0.0, 1.0);
  EXPECT_NEAR(escape_probability(0.0, 1.0), std::pow(1.0 - (h.a / h.c) * (h.a / h.c), 0.625), 1e-13);
  for (double x : {-0.1, -1.0, -5.0}) EXPECT_EQ(escape_probability(x, 0.0), 0.0);
  EXPECT_NEAR(escape_probability(0.0, 30.0), 1.0, 1e-12);
  EXPECT_THROW(escape_probability(1.0, 0.5), std::domain_error);
}

TEST(Escape, RangeAndMonotonicityOnGrid) {
  for (int i = 0; i < 100; ++i) {
    const double x = -5.0 + 0.1 * i;
    double prev = -1.0;
    for (int j = 0; j < 100; ++j) {
      const double xi = x + 0.01 + 0.06 * j;
      const double p = escape_probability(x, xi);
      ASSERT_GE(p, 0.0);
      ASSERT_LE(p, 1.0);
      ASSERT_GE(p, prev - 1e-15);
      EXPECT_NEAR(p, escape_probability_from_hull(x, xi), 1e-9);
      prev = p;
    }
  }
}

TEST(RightmostCdf, Contract) {
  EXPECT_EQ(rightmost_cdf(0.0), 0.0);
  EXPECT_NEAR(rightmost_cdf(30.0), 1.0, 1e-9);
  double prev = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const double v = rightmost_cdf(0.1 * i);
    EXPECT_GE(v, prev);
    EXPECT_LE(v, 1.0);
    prev = v;
  }
  // Numerical derivative is a density.
  const double h = 1e-3;
  for (double xi = 0.01; xi < 5.0; xi += 0.13) EXPECT_GE((rightmost_cdf(xi + h) - rightmost_cdf(xi)) / h, -1e-6);
  EXPECT_THROW(rightmost_cdf(1.0, 0.0), std::invalid_argument);
}

TEST(Covariance, Residuals) {
  EXPECT_EQ(conformal_covariance_check(CovarianceMap::identity, 0.0, 0.0, 1.0), 0.0);
  EXPECT_LT(conformal_covariance_check(CovarianceMap::dilation, 2.0, 0.0, 1.0), 1e-12);
  for (double w : {0.0, 0.5, -1.3, 2.0})
    EXPECT_LT(conformal_covariance_check(CovarianceMap::strip_to_halfplane, 0.0, 0.0, w), 1e-12) << w;
  EXPECT_THROW(conformal_covariance_check(CovarianceMap::dilation, -1.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(conformal_covariance_check(static_cast<CovarianceMap>(42), 1.0, 0.0, 1.0), std::invalid_argument);
}

TEST(Tables, Tabulation) {
  const auto r = tabulate_rho(uniform_grid(-3, 3, 0.5));
  EXPECT_EQ(r.grid.size(), 13u);
  EXPECT_EQ(r.kind, PredictionTable::Kind::density);
  EXPECT_NEAR(r(0.25), 0.5 * (rho(0.0) + rho(0.5)), 1e-15);
  EXPECT_EQ(r(-10.0), r.values.front());
  const auto c = tabulate_rightmost_cdf(uniform_grid(0, 5, 0.5));
  for (std::size_t i = 1; i < c.values.size(); ++i) EXPECT_GE(c.values[i], c.values[i - 1]);
  EXPECT_EQ(c.values.front(), 0.0);
  EXPECT_THROW(tabulate_rho({1.0, 0.5}), std::invalid_argument);
  EXPECT_THROW(uniform_grid(0, 1, 0), std::invalid_argument);
}
