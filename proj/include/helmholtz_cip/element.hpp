#pragma once

// P1 reference element and quadrature rules.

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "helmholtz_cip/error.hpp"
#include "helmholtz_cip/mesh.hpp"
#include "helmholtz_cip/types.hpp"

namespace helmholtz_cip {

struct LocalP1 {
  std::array<Vec2, 3> gradients;  // constant hat-function gradients
  double area = 0.0;
  std::array<double, 3> edge_lengths{};  // edge l joins local vertices l and l+1
};

inline LocalP1 p1_gradients(const Point& a, const Point& b, const Point& c) {
  const double area = signed_area(a, b, c);
  if (!(std::abs(area) > 1e-14 * ((b - a).squaredNorm() + (c - a).squaredNorm()))) {
    throw Error(ErrorKind::degenerate_element, "p1_gradients: triangle has zero area");
  }
  LocalP1 local;
  local.area = std::abs(area);
  // grad φ_i = rot(opposite edge) / (2 * signed area)
  const std::array<Point, 3> p{a, b, c};
  for (int i = 0; i < 3; ++i) {
    const Point& q = p[(i + 1) % 3];
    const Point& r = p[(i + 2) % 3];
    local.gradients[i] = Vec2(q.y() - r.y(), r.x() - q.x()) / (2.0 * area);
    local.edge_lengths[i] = (p[(i + 1) % 3] - p[i]).norm();
  }
  return local;
}

inline LocalP1 p1_gradients(const std::array<Point, 3>& corners) {
  return p1_gradients(corners[0], corners[1], corners[2]);
}

inline Eigen::Matrix3d local_stiffness(const LocalP1& local) {
  Eigen::Matrix3d k;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) k(i, j) = local.area * local.gradients[i].dot(local.gradients[j]);
  return k;
}

inline Eigen::Matrix3d local_mass(double area) {
  Eigen::Matrix3d m;
  m.setConstant(area / 12.0);
  m.diagonal().setConstant(area / 6.0);
  return m;
}

/// Normalised quadrature rule. For triangles each point is a barycentric
/// triple; for edges `points[q][0]` is the abscissa in [0, 1]. Weights sum to
/// one and are scaled by the measure where the rule is applied.
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const noexcept { return weights.size(); }
};

namespace detail {

inline void add_orbit_1(QuadratureRule& r, double w) {
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(w);
}

inline void add_orbit_3(QuadratureRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.points.push_back({a, a, b});
  r.points.push_back({a, b, a});
  r.points.push_back({b, a, a});
  for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

inline void add_orbit_6(QuadratureRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  const std::array<std::array<double, 3>, 6> perms{{{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}}};
  for (const auto& p : perms) {
    r.points.push_back(p);
    r.weights.push_back(w);
  }
}

}  // namespace detail

/// Symmetric triangle rules (Strang-Fix / Dunavant) exact up to `degree`.
inline QuadratureRule triangle_rule(int degree) {
  QuadratureRule r;
  r.degree = degree;
  switch (degree) {
    case 1:
      detail::add_orbit_1(r, 1.0);
      break;
    case 2:
      detail::add_orbit_3(r, 1.0 / 6.0, 1.0 / 3.0);
      break;
    case 4:
      detail::add_orbit_3(r, 0.445948490915965, 0.223381589678011);
      detail::add_orbit_3(r, 0.091576213509771, 0.109951743655322);
      break;
    case 5: {
      const double s = std::sqrt(15.0);
      detail::add_orbit_1(r, 9.0 / 40.0);
      detail::add_orbit_3(r, (6.0 - s) / 21.0, (155.0 - s) / 1200.0);
      detail::add_orbit_3(r, (6.0 + s) / 21.0, (155.0 + s) / 1200.0);
      break;
    }
    case 8:
      detail::add_orbit_1(r, 0.144315607677787);
      detail::add_orbit_3(r, 0.459292588292723, 0.095091634267285);
      detail::add_orbit_3(r, 0.170569307751760, 0.103217370534718);
      detail::add_orbit_3(r, 0.050547228317031, 0.032458497623198);
      detail::add_orbit_6(r, 0.008394777409958, 0.263112829634638, 0.027230314174435);
      break;
    default:
      throw Error(ErrorKind::invalid_argument,
                  "triangle_rule: unsupported degree " + std::to_string(degree) + " (expected 1, 2, 4, 5 or 8)");
  }
  return r;
}

/// Gauss-Legendre rule with n points mapped to [0, 1]; exact to degree 2n-1.
inline QuadratureRule edge_rule(int npoints) {
  if (npoints < 1 || npoints > 16) {
    throw Error(ErrorKind::invalid_argument, "edge_rule: npoints must be in 1..16, got " + std::to_string(npoints));
  }
  QuadratureRule r;
  r.degree = 2 * npoints - 1;
  const int n = npoints;
  // Legendre P_n(x) and P_n'(x) by the three-term recurrence.
  const auto legendre = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.points.push_back({0.5 * (1.0 - x), 0.0, 0.0});
    r.weights.push_back(0.5 * w);
  }
  return r;
}

/// Quadrature settings for one integral family: a triangle rule applied on a
/// uniform s×s subdivision of each element, plus an edge rule.
struct QuadratureSettings {
  int triangle_degree = 5;
  int subdivision = 1;
  int edge_points = 4;

  static QuadratureSettings load_default() { return {5, 1, 4}; }
  static QuadratureSettings error_default() { return {8, 2, 6}; }
};

/// Quadrature points of a triangle rule on an s×s uniform subdivision,
/// expressed as barycentric coordinates of the parent triangle. Weights are
/// normalised so they sum to one over the parent.
inline QuadratureRule subdivided_rule(const QuadratureRule& base, int s) {
  if (s < 1) throw Error(ErrorKind::invalid_argument, "subdivided_rule: subdivision must be >= 1");
  if (s == 1) return base;
  QuadratureRule r;
  r.degree = base.degree;
  const double inv = 1.0 / s;
  const double wscale = inv * inv;
  // Sub-triangles in reference coordinates (λ1, λ2) with λ0 = 1 - λ1 - λ2.
  const auto push = [&](std::array<double, 2> v0, std::array<double, 2> v1, std::array<double, 2> v2) {
    for (std::size_t q = 0; q < base.size(); ++q) {
      const auto& b = base.points[q];
      const double x = b[0] * v0[0] + b[1] * v1[0] + b[2] * v2[0];
      const double y = b[0] * v0[1] + b[1] * v1[1] + b[2] * v2[1];
      r.points.push_back({1.0 - x - y, x, y});
      r.weights.push_back(base.weights[q] * wscale);
    }
  };
  for (int j = 0; j < s; ++j) {
    for (int i = 0; i + j < s; ++i) {
      push({i * inv, j * inv}, {(i + 1) * inv, j * inv}, {i * inv, (j + 1) * inv});
      if (i + j + 1 < s) push({(i + 1) * inv, j * inv}, {(i + 1) * inv, (j + 1) * inv}, {i * inv, (j + 1) * inv});
    }
  }
  return r;
}

inline Point barycentric_point(const std::array<Point, 3>& c, const std::array<double, 3>& bary) {
  return bary[0] * c[0] + bary[1] * c[1] + bary[2] * c[2];
}

}  // namespace helmholtz_cip
