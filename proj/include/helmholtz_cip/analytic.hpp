#pragma once

// Benchmark problem on the unit hexagon:
//   -Δu - k²u = sin(kr)/r   in Ω,   ∂u/∂n + iku = g   on Γ,
// with the radial exact solution
//   u(r) = cos(kr)/k - C J0(kr),   C = (cos k + i sin k) / (k (J0(k) + i J1(k))).

#include <cmath>
#include <functional>
#include <string>

#include "helmholtz_cip/bessel.hpp"
#include "helmholtz_cip/error.hpp"
#include "helmholtz_cip/types.hpp"

namespace helmholtz_cip {

/// Caller-supplied data for a Helmholtz problem. `g` receives the boundary
/// point and the unit outward normal of the hexagon side it lies on.
struct ProblemData {
  std::function<Complex(const Point&)> f;
  std::function<Complex(const Point&, const Vec2&)> g;
};

/// Exact solution paired with its gradient, used for error measurement.
struct ExactSolution {
  std::function<Complex(const Point&)> u;
  std::function<ComplexVec2(const Point&)> grad;
};

class BenchmarkProblem {
 public:
  explicit BenchmarkProblem(double k) : k_(k) {
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw Error(ErrorKind::invalid_argument, "benchmark: wave number must be positive, got " + std::to_string(k));
    }
    const Complex denom = k * Complex(bessel::j0(k), bessel::j1(k));
    coefficient_ = Complex(std::cos(k), std::sin(k)) / denom;
  }

  double k() const noexcept { return k_; }
  Complex coefficient() const noexcept { return coefficient_; }

  Complex u_radial(double r) const {
    return std::cos(k_ * r) / k_ - coefficient_ * bessel::j0(k_ * r);
  }

  /// du/dr
  Complex du_dr(double r) const {
    return -std::sin(k_ * r) + coefficient_ * k_ * bessel::j1(k_ * r);
  }

  Complex u(const Point& p) const { return u_radial(p.norm()); }

  ComplexVec2 grad_u(const Point& p) const {
    const double r = p.norm();
    if (r == 0.0) return ComplexVec2::Zero();
    const Complex d = du_dr(r);
    return ComplexVec2(d * (p.x() / r), d * (p.y() / r));
  }

  /// sin(kr)/r, with the limit k at the origin.
  double f(const Point& p) const {
    const double r = p.norm();
    if (r == 0.0) return k_;
    return std::sin(k_ * r) / r;
  }

  /// ∂u/∂n + iku at a boundary point with unit outward normal n.
  Complex g(const Point& p, const Vec2& n) const {
    if (std::abs(n.norm() - 1.0) > 1e-12) {
      throw Error(ErrorKind::invalid_argument, "benchmark: boundary normal is not unit length");
    }
    const ComplexVec2 grad = grad_u(p);
    return grad.x() * n.x() + grad.y() * n.y() + imag_unit * k_ * u(p);
  }

  ProblemData data() const {
    return {[*this](const Point& p) { return Complex(f(p)); },
            [*this](const Point& p, const Vec2& n) { return g(p, n); }};
  }

  ExactSolution exact() const {
    return {[*this](const Point& p) { return u(p); }, [*this](const Point& p) { return grad_u(p); }};
  }

 private:
  double k_;
  Complex coefficient_;
};

}  // namespace helmholtz_cip
