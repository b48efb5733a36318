#pragma once

// Error measurement, nodal interpolation, elliptic projection and point
// sampling of P1 fields.

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "helmholtz_cip/analytic.hpp"
#include "helmholtz_cip/assembly.hpp"
#include "helmholtz_cip/element.hpp"
#include "helmholtz_cip/error.hpp"
#include "helmholtz_cip/mesh.hpp"
#include "helmholtz_cip/solver.hpp"
#include "helmholtz_cip/types.hpp"

namespace helmholtz_cip {

struct ExactNorms {
  double h1_semi = 0.0;  // ‖∇u‖_Ω
  double l2 = 0.0;       // ‖u‖_Ω
};

struct ErrorReport {
  double h1_semi_abs = 0.0;
  double l2_abs = 0.0;
  double broken_abs = 0.0;  // (‖∇e‖² + |σ| Σ h_e ‖[∂e/∂n_e]‖²)^{1/2}
  double jump_energy = 0.0;
  double h1_semi_exact = 0.0;
  double l2_exact = 0.0;
  double h1_semi_rel = 0.0;
  double l2_rel = 0.0;
  double broken_rel = 0.0;
};

namespace detail {

inline void check_dofs(const TriangleMesh& mesh, const ComplexVector& v, const char* who) {
  if (static_cast<std::size_t>(v.size()) != mesh.num_vertices()) {
    throw Error(ErrorKind::dimension_mismatch, std::string(who) + ": DOF vector length does not match vertex count");
  }
}

inline ComplexVec2 field_gradient(const LocalP1& local, const Triangle& tri, const ComplexVector& v) {
  ComplexVec2 g = ComplexVec2::Zero();
  for (int i = 0; i < 3; ++i) g += v[tri[i]] * local.gradients[i].cast<Complex>();
  return g;
}

}  // namespace detail

inline ComplexVector interpolate(const TriangleMesh& mesh, const std::function<Complex(const Point&)>& u) {
  ComplexVector v(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) v[static_cast<Eigen::Index>(i)] = u(mesh.vertices[i]);
  return v;
}

/// vᴴPv for the σ-free penalty matrix.
inline double jump_seminorm_squared(const RealSparse& penalty, const ComplexVector& v) {
  return std::max(0.0, (v.adjoint() * (penalty.cast<Complex>() * v)).value().real());
}

inline ExactNorms exact_norms(const TriangleMesh& mesh, const ExactSolution& exact,
                              const QuadratureSettings& quad = QuadratureSettings::error_default()) {
  const QuadratureRule rule = subdivided_rule(triangle_rule(quad.triangle_degree), quad.subdivision);
  double h1 = 0.0;
  double l2 = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto c = mesh.corners(t);
    const double area = std::abs(signed_area(c[0], c[1], c[2]));
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = barycentric_point(c, rule.points[q]);
      const double w = rule.weights[q] * area;
      h1 += w * exact.grad(x).squaredNorm();
      l2 += w * std::norm(exact.u(x));
    }
  }
  return {std::sqrt(h1), std::sqrt(l2)};
}

/// ‖∇u‖ and ‖u‖ of the benchmark solution, cached per k.
///
/// The solution is radial, so ∫_Ω F(r) dx = ∫_0^1 F(r) r Θ(r) dr where Θ(r) is
/// the angular measure of the circle of radius r inside the hexagon:
/// 2π below the apothem a = √3/2 and 2π - 12 arccos(a/r) above it. The outer
/// piece is integrated in s with r = a + (1 - a)s², which removes the square
/// root behaviour of Θ at r = a.
inline ExactNorms reference_exact_norms(double k) {
  static std::mutex mutex;
  static std::map<double, ExactNorms> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(k); it != cache.end()) return it->second;
  }
  const BenchmarkProblem problem(k);
  const double apothem = 0.5 * std::numbers::sqrt3;
  const QuadratureRule gauss = edge_rule(10);
  const int panels = std::max(64, static_cast<int>(std::ceil(4.0 * k)));
  double h1 = 0.0;
  double l2 = 0.0;
  const auto add = [&](double r, double weight) {
    const double theta = r <= apothem ? 2.0 * std::numbers::pi : 2.0 * std::numbers::pi - 12.0 * std::acos(apothem / r);
    h1 += weight * r * theta * std::norm(problem.du_dr(r));
    l2 += weight * r * theta * std::norm(problem.u_radial(r));
  };
  for (int p = 0; p < panels; ++p) {
    for (std::size_t q = 0; q < gauss.size(); ++q) {
      const double x = (p + gauss.points[q][0]) / panels;
      const double w = gauss.weights[q] / panels;
      add(apothem * x, apothem * w);
      const double r = apothem + (1.0 - apothem) * x * x;
      add(r, 2.0 * (1.0 - apothem) * x * w);
    }
  }
  const ExactNorms norms{std::sqrt(h1), std::sqrt(l2)};
  std::lock_guard lock(mutex);
  cache.emplace(k, norms);
  return norms;
}

/// Errors of u_h against an exact solution. The jump energy is |σ| uₕᴴPuₕ:
/// the exact solution is smooth and contributes no jumps. If `norms` is not
/// given the exact norms are integrated on this mesh.
inline ErrorReport error_norms(const TriangleMesh& mesh, const RealSparse& penalty, const ComplexVector& u_h,
                               const ExactSolution& exact, Complex sigma,
                               const QuadratureSettings& quad = QuadratureSettings::error_default(),
                               std::optional<ExactNorms> norms = std::nullopt) {
  detail::check_dofs(mesh, u_h, "error_norms");
  if (quad.triangle_degree < 4) {
    throw Error(ErrorKind::invalid_argument, "error_norms: quadrature degree must be >= 4");
  }
  const QuadratureRule rule = subdivided_rule(triangle_rule(quad.triangle_degree), quad.subdivision);
  double h1 = 0.0;
  double l2 = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto c = mesh.corners(t);
    const LocalP1 local = p1_gradients(c);
    const Triangle& tri = mesh.triangles[t];
    const ComplexVec2 grad_h = detail::field_gradient(local, tri, u_h);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& bary = rule.points[q];
      const Point x = barycentric_point(c, bary);
      const double w = rule.weights[q] * local.area;
      const Complex value_h = bary[0] * u_h[tri[0]] + bary[1] * u_h[tri[1]] + bary[2] * u_h[tri[2]];
      h1 += w * (exact.grad(x) - grad_h).squaredNorm();
      l2 += w * std::norm(exact.u(x) - value_h);
    }
  }
  const ExactNorms ref = norms ? *norms : exact_norms(mesh, exact, quad);
  ErrorReport r;
  r.h1_semi_abs = std::sqrt(h1);
  r.l2_abs = std::sqrt(l2);
  r.jump_energy = std::abs(sigma) * jump_seminorm_squared(penalty, u_h);
  r.broken_abs = std::sqrt(h1 + r.jump_energy);
  r.h1_semi_exact = ref.h1_semi;
  r.l2_exact = ref.l2;
  r.h1_semi_rel = ref.h1_semi > 0.0 ? r.h1_semi_abs / ref.h1_semi : 0.0;
  r.l2_rel = ref.l2 > 0.0 ? r.l2_abs / ref.l2 : 0.0;
  r.broken_rel = ref.h1_semi > 0.0 ? r.broken_abs / ref.h1_semi : 0.0;
  return r;
}

/// ‖∇v‖ and ‖v‖ of a discrete P1 field (exact for P1, no quadrature).
inline ExactNorms discrete_norms(const ComponentMatrices& c, const ComplexVector& v) {
  const auto quadratic = [&v](const RealSparse& a) {
    return std::max(0.0, (v.adjoint() * (a.cast<Complex>() * v)).value().real());
  };
  return {std::sqrt(quadratic(c.stiffness)), std::sqrt(quadratic(c.mass))};
}

/// Elliptic projection: solves (S + σP + ikB) w = r with
/// r_i = ∫_Ω ∇u·∇φ_i + ik ∫_Γ u φ_i.
inline ComplexVector elliptic_projection(const TriangleMesh& mesh, std::span<const Edge> edges,
                                         const ComponentMatrices& c, double k, Complex sigma,
                                         const ExactSolution& exact,
                                         const QuadratureSettings& quad = QuadratureSettings::error_default(),
                                         const SolveOptions& options = {}) {
  const QuadratureRule rule = subdivided_rule(triangle_rule(quad.triangle_degree), quad.subdivision);
  const QuadratureRule line = edge_rule(quad.edge_points);
  ComplexVector rhs = ComplexVector::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto corners = mesh.corners(t);
    const LocalP1 local = p1_gradients(corners);
    ComplexVec2 mean = ComplexVec2::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q)
      mean += exact.grad(barycentric_point(corners, rule.points[q])) * rule.weights[q];
    const Triangle& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      rhs[tri[i]] += local.area * (mean.x() * local.gradients[i].x() + mean.y() * local.gradients[i].y());
  }
  for (const Edge& e : edges) {
    if (e.interior()) continue;
    const Point& pa = mesh.vertices[e.vertices[0]];
    const Point& pb = mesh.vertices[e.vertices[1]];
    for (std::size_t q = 0; q < line.size(); ++q) {
      const double s = line.points[q][0];
      const Complex uw = imag_unit * k * exact.u((1.0 - s) * pa + s * pb) * (line.weights[q] * e.length);
      rhs[e.vertices[0]] += uw * (1.0 - s);
      rhs[e.vertices[1]] += uw * s;
    }
  }
  SparseComplexSystem sys;
  sys.n = c.size();
  sys.matrix = c.stiffness.cast<Complex>();
  sys.matrix += sigma * c.penalty.cast<Complex>();
  sys.matrix += Complex(0.0, k) * c.boundary_mass.cast<Complex>();
  sys.matrix.makeCompressed();
  sys.rhs = std::move(rhs);
  sys.k = k;
  sys.sigma = sigma;
  return solve(sys, options).solution;
}

/// Value of a P1 field at a point (lowest element label wins on shared edges).
inline Complex evaluate(const TriangleMesh& mesh, const PointLocator& locator, const ComplexVector& v, const Point& p) {
  const auto [t, bary] = locator.locate(p);
  const Triangle& tri = mesh.triangles[static_cast<std::size_t>(t)];
  return bary[0] * v[tri[0]] + bary[1] * v[tri[1]] + bary[2] * v[tri[2]];
}

struct TraceSample {
  double t = 0.0;  // segment parameter in [0, 1]
  Point point = Point::Zero();
  Complex value{0.0, 0.0};
};

/// n equally spaced samples of a P1 field along the segment from a to b.
inline std::vector<TraceSample> sample_trace(const TriangleMesh& mesh, const ComplexVector& v, const Point& a,
                                             const Point& b, int n) {
  detail::check_dofs(mesh, v, "sample_trace");
  if (n < 1) throw Error(ErrorKind::invalid_argument, "sample_trace: need at least one sample");
  const PointLocator locator(mesh);
  std::vector<TraceSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    const Point p = (1.0 - t) * a + t * b;
    out.push_back({t, p, evaluate(mesh, locator, v, p)});
  }
  return out;
}

}  // namespace helmholtz_cip
