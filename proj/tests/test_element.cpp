#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "helmholtz_cip/element.hpp"

namespace helmholtz_cip {
namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// ∫ x^a y^b over the unit right triangle = a! b! / (a + b + 2)!
double monomial_integral(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

double apply(const QuadratureRule& rule, int a, int b) {
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double x = rule.points[q][1];
    const double y = rule.points[q][2];
    sum += rule.weights[q] * std::pow(x, a) * std::pow(y, b);
  }
  return 0.5 * sum;  // reference area
}

TEST(P1, ReferenceTriangleGradients) {
  const LocalP1 local = p1_gradients(Point(0, 0), Point(1, 0), Point(0, 1));
  EXPECT_EQ(local.area, 0.5);
  EXPECT_TRUE(local.gradients[0].isApprox(Vec2(-1, -1)));
  EXPECT_TRUE(local.gradients[1].isApprox(Vec2(1, 0)));
  EXPECT_TRUE(local.gradients[2].isApprox(Vec2(0, 1)));
}

TEST(P1, GradientsSumToZeroAndStiffnessKernelIsConstants) {
  const LocalP1 local = p1_gradients(Point(0.3, -0.2), Point(1.7, 0.4), Point(-0.5, 2.1));
  EXPECT_LT((local.gradients[0] + local.gradients[1] + local.gradients[2]).norm(), 1e-14);
  const Eigen::Matrix3d k = local_stiffness(local);
  EXPECT_LT((k - k.transpose()).norm(), 1e-15);
  EXPECT_LT((k * Eigen::Vector3d::Ones()).norm(), 1e-14);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(k);
  EXPECT_NEAR(eig.eigenvalues()[0], 0.0, 1e-14);
  EXPECT_GT(eig.eigenvalues()[1], 0.0);
}

TEST(P1, EquilateralArea) {
  for (int m : {1, 4, 30}) {
    const double s = 1.0 / m;
    const LocalP1 local = p1_gradients(Point(0, 0), Point(s, 0), Point(0.5 * s, 0.5 * std::numbers::sqrt3 * s));
    EXPECT_NEAR(local.area, std::numbers::sqrt3 / (4.0 * m * m), 1e-16);
  }
}

TEST(P1, DegenerateTriangleThrows) {
  EXPECT_THROW(p1_gradients(Point(0, 0), Point(1, 1), Point(2, 2)), Error);
}

TEST(P1, LocalMassMatchesQuadrature) {
  const std::array<Point, 3> c{Point(0.1, 0.2), Point(1.3, 0.1), Point(0.4, 0.9)};
  const double area = signed_area(c[0], c[1], c[2]);
  const Eigen::Matrix3d closed = local_mass(area);
  const QuadratureRule rule = triangle_rule(2);
  Eigen::Matrix3d quad = Eigen::Matrix3d::Zero();
  for (std::size_t q = 0; q < rule.size(); ++q)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) quad(i, j) += area * rule.weights[q] * rule.points[q][i] * rule.points[q][j];
  EXPECT_LT((closed - quad).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Quadrature, TriangleRulesAreExactToTheirDegree) {
  for (int degree : {1, 2, 4, 5, 8}) {
    const QuadratureRule rule = triangle_rule(degree);
    double wsum = 0.0;
    for (double w : rule.weights) {
      EXPECT_GT(w, 0.0);
      wsum += w;
    }
    EXPECT_NEAR(wsum, 1.0, 1e-14) << degree;
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b)
        EXPECT_NEAR(apply(rule, a, b), monomial_integral(a, b), 1e-12) << "degree " << degree << " x^" << a << " y^" << b;
  }
}

TEST(Quadrature, SpecificValues) {
  EXPECT_NEAR(apply(triangle_rule(2), 2, 0), 1.0 / 12.0, 1e-15);
  const QuadratureRule centroid = triangle_rule(1);
  ASSERT_EQ(centroid.size(), 1u);
  EXPECT_EQ(centroid.weights[0], 1.0);
}

TEST(Quadrature, UnsupportedDegreeThrows) {
  EXPECT_THROW(triangle_rule(3), Error);
  EXPECT_THROW(edge_rule(0), Error);
  EXPECT_THROW(edge_rule(17), Error);
}

TEST(Quadrature, GaussLegendreExactness) {
  for (int n = 1; n <= 16; ++n) {
    const QuadratureRule rule = edge_rule(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double sum = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) sum += rule.weights[q] * std::pow(rule.points[q][0], p);
      ASSERT_NEAR(sum, 1.0 / (p + 1), 1e-13) << "n=" << n << " p=" << p;
    }
  }
}

TEST(Quadrature, SubdivisionPreservesExactnessAndRefines) {
  const QuadratureRule base = triangle_rule(5);
  for (int s : {2, 3, 4}) {
    const QuadratureRule rule = subdivided_rule(base, s);
    EXPECT_EQ(rule.size(), base.size() * s * s);
    for (int a = 0; a <= 5; ++a)
      for (int b = 0; a + b <= 5; ++b) ASSERT_NEAR(apply(rule, a, b), monomial_integral(a, b), 1e-13);
  }
  // A non-polynomial integrand converges as s grows.
  const auto integrate = [&](int s) {
    const QuadratureRule rule = subdivided_rule(triangle_rule(2), s);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) sum += rule.weights[q] * std::sin(20.0 * rule.points[q][1]);
    return 0.5 * sum;
  };
  const double exact = (20.0 - std::sin(20.0)) / 400.0;  // ∫_0^1 sin(20x)(1-x) dx
  const double e2 = std::abs(integrate(2) - exact), e8 = std::abs(integrate(8) - exact);
  const double e16 = std::abs(integrate(16) - exact);
  EXPECT_LT(e8, e2);
  EXPECT_LT(e16, e8 / 4.0);  // third order in the sub-triangle size
  EXPECT_NEAR(integrate(16), exact, 1e-4);
}

}  // namespace
}  // namespace helmholtz_cip
