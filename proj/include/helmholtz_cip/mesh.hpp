#pragma once

// Structured equilateral triangulation of the unit regular hexagon and its
// edge topology.
//
// The hexagon is flat-top with corners at angles 0°, 60°, ..., 300° and side 1.
// Vertices are the lattice points i*a + j*b with a = (1/m, 0),
// b = (1/(2m), √3/(2m)) and axial coordinates |i|, |j|, |i+j| <= m.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "helmholtz_cip/error.hpp"
#include "helmholtz_cip/types.hpp"

namespace helmholtz_cip {

using Triangle = std::array<int, 3>;

struct TriangleMesh {
  int m = 0;
  double h = 0.0;
  std::vector<Point> vertices;
  std::vector<Triangle> triangles;  // counterclockwise; index = global element label

  std::size_t num_vertices() const noexcept { return vertices.size(); }
  std::size_t num_triangles() const noexcept { return triangles.size(); }

  std::array<Point, 3> corners(std::size_t t) const {
    const Triangle& tri = triangles[t];
    return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
  }
};

enum class EdgeKind { interior, boundary };

/// An edge of the triangulation.
///
/// For interior edges `plus` is the adjacent element with the larger global
/// label and `minus` the smaller one; `normal` is the unit outward normal of
/// `plus`, so jumps are [v] = v|plus - v|minus. For boundary edges `minus` is -1
/// and `normal` is the outward normal of the domain.
struct Edge {
  std::array<int, 2> vertices{};
  EdgeKind kind = EdgeKind::boundary;
  int plus = -1;
  int minus = -1;
  Vec2 normal = Vec2::Zero();
  double length = 0.0;

  bool interior() const noexcept { return kind == EdgeKind::interior; }
};

inline double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

inline TriangleMesh build_hexagon_mesh(int m) {
  if (m < 1) {
    throw Error(ErrorKind::invalid_argument, "build_hexagon_mesh: m must be >= 1, got " + std::to_string(m));
  }
  TriangleMesh mesh;
  mesh.m = m;
  mesh.h = 1.0 / m;
  const double ax = 1.0 / m;
  const double bx = 0.5 / m;
  const double by = 0.5 * std::numbers::sqrt3 / m;

  const auto inside = [m](int i, int j) { return std::abs(i) <= m && std::abs(j) <= m && std::abs(i + j) <= m; };
  const int side = 2 * m + 1;
  // Integer lattice coordinates -> vertex index; dedup by construction.
  std::vector<int> index(static_cast<std::size_t>(side) * side, -1);
  const auto slot = [m, side](int i, int j) { return static_cast<std::size_t>(j + m) * side + (i + m); };

  mesh.vertices.reserve(3 * m * m + 3 * m + 1);
  for (int j = -m; j <= m; ++j) {
    for (int i = std::max(-m, -m - j); i <= std::min(m, m - j); ++i) {
      index[slot(i, j)] = static_cast<int>(mesh.vertices.size());
      mesh.vertices.emplace_back(i * ax + j * bx, j * by);
    }
  }

  mesh.triangles.reserve(6 * m * m);
  for (int j = -m; j < m; ++j) {
    for (int i = -m; i < m; ++i) {
      if (inside(i, j) && inside(i + 1, j) && inside(i, j + 1)) {
        mesh.triangles.push_back({index[slot(i, j)], index[slot(i + 1, j)], index[slot(i, j + 1)]});
      }
      if (inside(i + 1, j) && inside(i + 1, j + 1) && inside(i, j + 1)) {
        mesh.triangles.push_back({index[slot(i + 1, j)], index[slot(i + 1, j + 1)], index[slot(i, j + 1)]});
      }
    }
  }
  return mesh;
}

/// Unique edges sorted by (min vertex, max vertex).
inline std::vector<Edge> extract_edges(const TriangleMesh& mesh) {
  struct HalfEdge {
    int lo, hi, element, from, to;
  };
  std::vector<HalfEdge> halves;
  halves.reserve(3 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    for (int l = 0; l < 3; ++l) {
      const int a = tri[l];
      const int b = tri[(l + 1) % 3];
      halves.push_back({std::min(a, b), std::max(a, b), static_cast<int>(t), a, b});
    }
  }
  std::sort(halves.begin(), halves.end(), [](const HalfEdge& x, const HalfEdge& y) {
    if (x.lo != y.lo) return x.lo < y.lo;
    if (x.hi != y.hi) return x.hi < y.hi;
    return x.element < y.element;
  });

  std::vector<Edge> edges;
  edges.reserve(halves.size() / 2 + mesh.num_triangles());
  std::size_t pos = 0;
  while (pos < halves.size()) {
    std::size_t end = pos + 1;
    while (end < halves.size() && halves[end].lo == halves[pos].lo && halves[end].hi == halves[pos].hi) ++end;
    const std::size_t count = end - pos;
    if (count > 2) {
      throw Error(ErrorKind::non_manifold_mesh, "extract_edges: edge (" + std::to_string(halves[pos].lo) + ", " +
                                                    std::to_string(halves[pos].hi) + ") has " +
                                                    std::to_string(count) + " adjacent triangles");
    }
    // Sorted by element, so the last half-edge belongs to the larger label.
    const HalfEdge& owner = halves[end - 1];
    Edge e;
    e.vertices = {owner.lo, owner.hi};
    e.kind = count == 2 ? EdgeKind::interior : EdgeKind::boundary;
    e.plus = owner.element;
    e.minus = count == 2 ? halves[pos].element : -1;
    const Vec2 d = mesh.vertices[owner.to] - mesh.vertices[owner.from];
    e.length = d.norm();
    // Counterclockwise traversal: the outward normal is the tangent rotated clockwise.
    e.normal = Vec2(d.y(), -d.x()) / e.length;
    edges.push_back(e);
    pos = end;
  }
  return edges;
}

inline void export_mesh(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_failure, "export_mesh: cannot open '" + path + "' for writing");
  out.precision(17);
  out << "hexmesh m=" << mesh.m << '\n';
  for (const Point& p : mesh.vertices) out << "v " << p.x() << ' ' << p.y() << '\n';
  for (const Triangle& t : mesh.triangles) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  if (!out) throw Error(ErrorKind::io_failure, "export_mesh: write failed for '" + path + "'");
}

inline TriangleMesh import_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_failure, "import_mesh: cannot open '" + path + "'");
  TriangleMesh mesh;
  std::string line;
  if (!std::getline(in, line) || line.rfind("hexmesh m=", 0) != 0) {
    throw Error(ErrorKind::io_failure, "import_mesh: missing 'hexmesh m=<m>' header in '" + path + "'");
  }
  mesh.m = std::stoi(line.substr(10));
  mesh.h = mesh.m > 0 ? 1.0 / mesh.m : 0.0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    char tag = 0;
    row >> tag;
    if (tag == 'v') {
      std::string xs, ys;
      row >> xs >> ys;
      mesh.vertices.emplace_back(std::strtod(xs.c_str(), nullptr), std::strtod(ys.c_str(), nullptr));
    } else if (tag == 't') {
      Triangle t{};
      row >> t[0] >> t[1] >> t[2];
      mesh.triangles.push_back(t);
    } else {
      row.setstate(std::ios::failbit);
    }
    if (row.fail()) {
      throw Error(ErrorKind::io_failure, "import_mesh: malformed line " + std::to_string(lineno) + " in '" + path + "'");
    }
  }
  return mesh;
}

/// Bucket grid for point location. Among all triangles containing a point
/// (within a small tolerance), the one with the lowest label is returned.
class PointLocator {
 public:
  explicit PointLocator(const TriangleMesh& mesh) : mesh_(&mesh) {
    lo_ = hi_ = mesh.vertices.front();
    for (const Point& p : mesh.vertices) {
      lo_ = lo_.cwiseMin(p);
      hi_ = hi_.cwiseMax(p);
    }
    const double extent = std::max(hi_.x() - lo_.x(), hi_.y() - lo_.y());
    cells_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.num_triangles()) / 2.0)));
    cell_size_ = extent / cells_ * (1.0 + 1e-12);
    buckets_.assign(static_cast<std::size_t>(cells_) * cells_, {});
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const auto c = mesh.corners(t);
      const Point tmin = c[0].cwiseMin(c[1]).cwiseMin(c[2]);
      const Point tmax = c[0].cwiseMax(c[1]).cwiseMax(c[2]);
      const auto [i0, j0] = cell_of(tmin);
      const auto [i1, j1] = cell_of(tmax);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * cells_ + i].push_back(static_cast<int>(t));
    }
  }

  /// Element containing p and its barycentric coordinates; throws if p lies outside.
  std::pair<int, std::array<double, 3>> locate(const Point& p) const {
    constexpr double tol = 1e-12;
    if (p.x() >= lo_.x() - tol && p.y() >= lo_.y() - tol && p.x() <= hi_.x() + tol && p.y() <= hi_.y() + tol) {
      const auto [i, j] = cell_of(p);
      for (int t : buckets_[static_cast<std::size_t>(j) * cells_ + i]) {  // ascending labels
        const auto c = mesh_->corners(t);
        const double area = signed_area(c[0], c[1], c[2]);
        const std::array<double, 3> bary{signed_area(p, c[1], c[2]) / area, signed_area(c[0], p, c[2]) / area,
                                          signed_area(c[0], c[1], p) / area};
        if (bary[0] >= -tol && bary[1] >= -tol && bary[2] >= -tol) return {t, bary};
      }
    }
    std::ostringstream msg;
    msg << "point (" << p.x() << ", " << p.y() << ") lies outside the mesh";
    throw Error(ErrorKind::point_outside_mesh, msg.str());
  }

 private:
  std::pair<int, int> cell_of(const Point& p) const {
    const auto clamp = [this](double v) { return std::clamp(static_cast<int>(std::floor(v / cell_size_)), 0, cells_ - 1); };
    return {clamp(p.x() - lo_.x()), clamp(p.y() - lo_.y())};
  }

  const TriangleMesh* mesh_;
  Point lo_, hi_;
  int cells_ = 1;
  double cell_size_ = 1.0;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace helmholtz_cip
