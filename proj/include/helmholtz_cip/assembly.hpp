#pragma once

// Global system of the CIP discretisation
//   A(σ, k) = S + σP - k²M + ikB,   b = F + G,
// where S, M, B are the P1 stiffness, mass and boundary-mass matrices and P is
// the σ-free normal-derivative jump penalty
//   P_ij = Σ_{e interior} γ_e h_e ∫_e [∂φ_j/∂n_e][∂φ_i/∂n_e].

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "helmholtz_cip/analytic.hpp"
#include "helmholtz_cip/element.hpp"
#include "helmholtz_cip/error.hpp"
#include "helmholtz_cip/mesh.hpp"
#include "helmholtz_cip/types.hpp"

namespace helmholtz_cip {

/// Complex coefficient σ multiplying the jump penalty. The pure interior
/// penalty choice is σ = iγ; σ = 0 is plain linear FEM.
struct PenaltyParameter {
  Complex sigma{0.0, 0.0};

  static PenaltyParameter from_gamma(double gamma) { return from_parts(0.0, gamma); }

  static PenaltyParameter from_parts(double re, double im) {
    PenaltyParameter p{Complex(re, im)};
    if (im < 0.0) {
      std::clog << "warning: penalty parameter has negative imaginary part (" << re << ", " << im
                << "); discrete well-posedness is not guaranteed\n";
    }
    return p;
  }

  /// Weight of the jump term in the broken norm: |σ| (γ when σ = iγ).
  double magnitude() const { return std::abs(sigma); }
};

struct ComponentMatrices {
  RealSparse stiffness;
  RealSparse mass;
  RealSparse boundary_mass;
  RealSparse penalty;

  Eigen::Index size() const { return stiffness.rows(); }
};

struct SparseComplexSystem {
  Eigen::Index n = 0;
  ComplexSparse matrix;
  ComplexVector rhs;
  double k = 0.0;
  Complex sigma{0.0, 0.0};
};

namespace detail {

using Triplets = std::vector<Eigen::Triplet<double>>;

inline RealSparse from_triplets(Eigen::Index n, const Triplets& triplets) {
  RealSparse a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

}  // namespace detail

inline RealSparse assemble_stiffness(const TriangleMesh& mesh) {
  detail::Triplets trips;
  trips.reserve(9 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Eigen::Matrix3d local = local_stiffness(p1_gradients(mesh.corners(t)));
    const Triangle& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trips.emplace_back(tri[i], tri[j], local(i, j));
  }
  return detail::from_triplets(static_cast<Eigen::Index>(mesh.num_vertices()), trips);
}

inline RealSparse assemble_mass(const TriangleMesh& mesh) {
  detail::Triplets trips;
  trips.reserve(9 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto c = mesh.corners(t);
    const Eigen::Matrix3d local = local_mass(std::abs(signed_area(c[0], c[1], c[2])));
    const Triangle& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trips.emplace_back(tri[i], tri[j], local(i, j));
  }
  return detail::from_triplets(static_cast<Eigen::Index>(mesh.num_vertices()), trips);
}

inline RealSparse assemble_boundary_mass(const TriangleMesh& mesh, std::span<const Edge> edges) {
  detail::Triplets trips;
  for (const Edge& e : edges) {
    if (e.interior()) continue;
    const auto [a, b] = e.vertices;
    trips.emplace_back(a, a, e.length / 3.0);
    trips.emplace_back(b, b, e.length / 3.0);
    trips.emplace_back(a, b, e.length / 6.0);
    trips.emplace_back(b, a, e.length / 6.0);
  }
  return detail::from_triplets(static_cast<Eigen::Index>(mesh.num_vertices()), trips);
}

/// Normal-derivative jump coefficients of the hat functions on an interior
/// edge: [∂φ_v/∂n_e] for each vertex v of the two adjacent triangles.
inline std::vector<std::pair<int, double>> normal_jump_row(const TriangleMesh& mesh, const Edge& e) {
  std::vector<std::pair<int, double>> row;
  row.reserve(4);
  const auto accumulate = [&](int element, double sign) {
    const LocalP1 local = p1_gradients(mesh.corners(static_cast<std::size_t>(element)));
    const Triangle& tri = mesh.triangles[static_cast<std::size_t>(element)];
    for (int l = 0; l < 3; ++l) {
      const double value = sign * local.gradients[l].dot(e.normal);
      auto it = std::find_if(row.begin(), row.end(), [&](const auto& entry) { return entry.first == tri[l]; });
      if (it == row.end()) {
        row.emplace_back(tri[l], value);
      } else {
        it->second += value;
      }
    }
  };
  accumulate(e.plus, 1.0);
  accumulate(e.minus, -1.0);
  return row;
}

/// σ-free jump penalty. `edge_weights`, when given, holds one relative γ_e per
/// entry of `edges` (boundary entries are ignored); default is uniform 1.
inline RealSparse assemble_jump_penalty(const TriangleMesh& mesh, std::span<const Edge> edges,
                                        std::span<const double> edge_weights = {}) {
  if (!edge_weights.empty() && edge_weights.size() != edges.size()) {
    throw Error(ErrorKind::dimension_mismatch, "assemble_jump_penalty: edge weight count does not match edge count");
  }
  detail::Triplets trips;
  for (std::size_t ei = 0; ei < edges.size(); ++ei) {
    const Edge& e = edges[ei];
    if (!e.interior()) continue;
    const double weight = (edge_weights.empty() ? 1.0 : edge_weights[ei]) * e.length * e.length;
    const auto row = normal_jump_row(mesh, e);
    for (const auto& [i, ci] : row)
      for (const auto& [j, cj] : row) trips.emplace_back(i, j, weight * ci * cj);
  }
  return detail::from_triplets(static_cast<Eigen::Index>(mesh.num_vertices()), trips);
}

inline ComponentMatrices assemble_components(const TriangleMesh& mesh, std::span<const Edge> edges,
                                             std::span<const double> edge_weights = {}) {
  return {assemble_stiffness(mesh), assemble_mass(mesh), assemble_boundary_mass(mesh, edges),
          assemble_jump_penalty(mesh, edges, edge_weights)};
}

/// b_i = ∫_Ω f φ_i + ∫_Γ g φ_i.
inline ComplexVector assemble_load(const TriangleMesh& mesh, std::span<const Edge> edges, const ProblemData& data,
                                   const QuadratureSettings& quad = QuadratureSettings::load_default()) {
  const QuadratureRule rule = subdivided_rule(triangle_rule(quad.triangle_degree), quad.subdivision);
  const QuadratureRule line = edge_rule(quad.edge_points);
  ComplexVector b = ComplexVector::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  if (data.f) {
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const auto c = mesh.corners(t);
      const double area = std::abs(signed_area(c[0], c[1], c[2]));
      const Triangle& tri = mesh.triangles[t];
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& bary = rule.points[q];
        const Complex fw = data.f(barycentric_point(c, bary)) * (rule.weights[q] * area);
        for (int i = 0; i < 3; ++i) b[tri[i]] += fw * bary[i];
      }
    }
  }
  if (data.g) {
    for (const Edge& e : edges) {
      if (e.interior()) continue;
      const Point& pa = mesh.vertices[e.vertices[0]];
      const Point& pb = mesh.vertices[e.vertices[1]];
      for (std::size_t q = 0; q < line.size(); ++q) {
        const double s = line.points[q][0];
        const Complex gw = data.g((1.0 - s) * pa + s * pb, e.normal) * (line.weights[q] * e.length);
        b[e.vertices[0]] += gw * (1.0 - s);
        b[e.vertices[1]] += gw * s;
      }
    }
  }
  return b;
}

/// A = S + σP - k²M + ikB on the union sparsity pattern.
inline ComplexSparse compose_matrix(const ComponentMatrices& c, double k, Complex sigma) {
  const Eigen::Index n = c.size();
  for (const RealSparse* m : {&c.mass, &c.boundary_mass, &c.penalty}) {
    if (m->rows() != n || m->cols() != n) {
      throw Error(ErrorKind::dimension_mismatch, "compose_system: component matrices differ in size");
    }
  }
  ComplexSparse a = c.stiffness.cast<Complex>();
  a += sigma * c.penalty.cast<Complex>();
  a += Complex(-k * k, 0.0) * c.mass.cast<Complex>();
  a += Complex(0.0, k) * c.boundary_mass.cast<Complex>();
  a.makeCompressed();
  return a;
}

inline SparseComplexSystem compose_system(const ComponentMatrices& c, double k, Complex sigma,
                                          ComplexVector rhs = {}) {
  if (rhs.size() != 0 && rhs.size() != c.size()) {
    throw Error(ErrorKind::dimension_mismatch, "compose_system: load vector length does not match matrix size");
  }
  SparseComplexSystem sys;
  sys.n = c.size();
  sys.matrix = compose_matrix(c, k, sigma);
  sys.rhs = rhs.size() == 0 ? ComplexVector::Zero(c.size()) : std::move(rhs);
  sys.k = k;
  sys.sigma = sigma;
  return sys;
}

/// Coordinate text export: one `i j re im` line per stored entry, 0-based.
inline void export_matrix(const ComplexSparse& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_failure, "export_matrix: cannot open '" + path + "' for writing");
  out.precision(17);
  for (Eigen::Index col = 0; col < a.outerSize(); ++col)
    for (ComplexSparse::InnerIterator it(a, col); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
  if (!out) throw Error(ErrorKind::io_failure, "export_matrix: write failed for '" + path + "'");
}

}  // namespace helmholtz_cip
