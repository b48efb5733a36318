#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "helmholtz_cip/analytic.hpp"

namespace helmholtz_cip {
namespace {

Point random_interior_point(std::mt19937_64& rng) {
  // Disc of radius 0.8 lies inside the hexagon (apothem √3/2).
  std::uniform_real_distribution<double> radius(0.05, 0.8);
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
  const double r = radius(rng);
  const double t = angle(rng);
  return {r * std::cos(t), r * std::sin(t)};
}

TEST(Benchmark, ValueAndGradientAtOrigin) {
  const BenchmarkProblem p(10.0);
  const Complex u0 = p.u(Point::Zero());
  EXPECT_NEAR(std::abs(u0 - (1.0 / 10.0 - p.coefficient())), 0.0, 1e-15);
  EXPECT_EQ(p.grad_u(Point::Zero()), ComplexVec2::Zero());
}

TEST(Benchmark, SourceLimitsAndZeros) {
  const double k = 7.0;
  const BenchmarkProblem p(k);
  EXPECT_EQ(p.f(Point::Zero()), k);
  EXPECT_NEAR(p.f(Point(std::numbers::pi / k, 0.0)), 0.0, 1e-15);
}

TEST(Benchmark, CoefficientNormalisation) {
  for (int k = 1; k <= 500; ++k) {
    const BenchmarkProblem p(k);
    const Complex c = p.coefficient();
    ASSERT_TRUE(std::isfinite(c.real()) && std::isfinite(c.imag()));
    const double lhs = std::abs(static_cast<double>(k) * c * Complex(bessel::j0(k), bessel::j1(k)));
    ASSERT_NEAR(lhs, 1.0, 1e-12) << k;
  }
}

TEST(Benchmark, FiniteDifferenceResidualOfPde) {
  const double k = 10.0;
  const BenchmarkProblem p(k);
  const double step = 1e-4;
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 50; ++i) {
    const Point x = random_interior_point(rng);
    const Complex lap = (p.u(x + Point(step, 0)) + p.u(x - Point(step, 0)) + p.u(x + Point(0, step)) +
                         p.u(x - Point(0, step)) - 4.0 * p.u(x)) /
                        (step * step);
    const Complex residual = -lap - k * k * p.u(x) - p.f(x);
    EXPECT_LE(std::abs(residual), 1e-4) << x.transpose();
  }
}

TEST(Benchmark, GradientMatchesCentralDifferences) {
  const double step = 1e-6;
  for (double k : {5.0, 50.0}) {
    const BenchmarkProblem p(k);
    std::mt19937_64 rng(static_cast<unsigned>(k));
    for (int i = 0; i < 100; ++i) {
      const Point x = random_interior_point(rng);
      const ComplexVec2 g = p.grad_u(x);
      const Complex dx = (p.u(x + Point(step, 0)) - p.u(x - Point(step, 0))) / (2 * step);
      const Complex dy = (p.u(x + Point(0, step)) - p.u(x - Point(0, step))) / (2 * step);
      // Scale by k: the gradient is O(1) but round-off in u is amplified by 1/step.
      EXPECT_LE(std::abs(g.x() - dx), 1e-6 * std::max(1.0, k / 10)) << k;
      EXPECT_LE(std::abs(g.y() - dy), 1e-6 * std::max(1.0, k / 10)) << k;
    }
  }
}

TEST(Benchmark, BoundaryDataIsRobinTraceOfExactSolution) {
  const double k = 12.0;
  const BenchmarkProblem p(k);
  // Right side of the flat-top hexagon: corners (1,0) and (1/2, √3/2).
  const Vec2 n(std::cos(std::numbers::pi / 6), std::sin(std::numbers::pi / 6));
  const Point x = 0.5 * (Point(1.0, 0.0) + Point(0.5, 0.5 * std::numbers::sqrt3));
  const ComplexVec2 g = p.grad_u(x);
  const Complex expected = g.x() * n.x() + g.y() * n.y() + imag_unit * k * p.u(x);
  EXPECT_NEAR(std::abs(p.g(x, n) - expected), 0.0, 1e-14);
  EXPECT_THROW(p.g(x, 2.0 * n), Error);
}

TEST(Benchmark, RejectsNonPositiveWaveNumber) {
  EXPECT_THROW(BenchmarkProblem(0.0), Error);
  EXPECT_THROW(BenchmarkProblem(-3.0), Error);
}

}  // namespace
}  // namespace helmholtz_cip
