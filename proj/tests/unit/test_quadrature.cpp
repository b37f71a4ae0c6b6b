#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sspkit/errors.hpp"
#include "sspkit/quadrature.hpp"

using sspkit::adaptive_simpson;

TEST(Quadrature, PolynomialIsExact) {
  EXPECT_NEAR(adaptive_simpson([](double x) { return x * x; }, 0.0, 1.0), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(adaptive_simpson([](double x) { return x * x * x - 2.0 * x; }, -1.0, 2.0),
              (16.0 - 1.0) / 4.0 - 3.0, 1e-13);
}

TEST(Quadrature, SignedOrientation) {
  auto f = [](double x) { return std::exp(x); };
  const double fwd = adaptive_simpson(f, 0.2, 0.9);
  EXPECT_NEAR(fwd, std::exp(0.9) - std::exp(0.2), 1e-10);
  EXPECT_DOUBLE_EQ(adaptive_simpson(f, 0.9, 0.2), -fwd);
  EXPECT_EQ(adaptive_simpson(f, 0.4, 0.4), 0.0);
}

TEST(Quadrature, PiecewiseConstantJump) {
  // jump at an irrational point so no Simpson node lands on it
  const double c = 1.0 / std::numbers::sqrt2;
  auto step = [c](double x) { return x < c ? 0.25 : 1.0; };
  EXPECT_NEAR(adaptive_simpson(step, 0.0, 1.0), 0.25 * c + (1.0 - c), 1e-9);
}

TEST(Quadrature, SmoothOscillatory) {
  auto f = [](double x) { return std::sin(20.0 * x); };
  EXPECT_NEAR(adaptive_simpson(f, 0.0, 1.0), (1.0 - std::cos(20.0)) / 20.0, 1e-10);
}

TEST(Quadrature, DepthExhaustionThrows) {
  sspkit::QuadratureOptions opts;
  opts.abs_tol = 1e-14;
  opts.max_depth = 3;
  auto step = [](double x) { return x < 0.3 ? 0.0 : 1.0; };
  EXPECT_THROW(adaptive_simpson(step, 0.0, 1.0, opts), sspkit::NumericError);
}
