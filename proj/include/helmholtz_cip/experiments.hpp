#pragma once

// Experiment drivers on the hexagon benchmark: stability sweeps, convergence
// studies, critical mesh sizes, DOF tables and penalty-parameter studies.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "helmholtz_cip/analysis.hpp"
#include "helmholtz_cip/analytic.hpp"
#include "helmholtz_cip/assembly.hpp"
#include "helmholtz_cip/mesh.hpp"
#include "helmholtz_cip/solver.hpp"

namespace helmholtz_cip {

inline constexpr Complex sigma_stability{0.0, 0.1};  // γ = 0.1
inline constexpr Complex sigma_tuned{-0.07, 0.01};

inline long long dof_count(int m) { return 3LL * m * m + 3LL * m + 1; }

/// m = ceil(k / kh), guarded against round-off in the quotient.
inline int mesh_index_for_kh(double k, double kh) {
  if (!(kh > 0.0)) throw Error(ErrorKind::invalid_argument, "kh must be positive");
  return std::max(1, static_cast<int>(std::ceil(k / kh - 1e-9)));
}

/// C_sta = 1/k + 1/(k²h) + 1/(k³h²γ); equals 12/k when kh = 1 and γ = 0.1.
inline double stability_constant(double k, double h, double gamma) {
  return 1.0 / k + 1.0 / (k * k * h) + 1.0 / (k * k * k * h * h * gamma);
}

/// Least-squares slope of log(y) against log(x) over the last ceil(n/2) points.
inline double tail_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::nan("");
  const std::size_t take = std::max<std::size_t>(2, (n + 1) / 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = n - take; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double t = static_cast<double>(take);
  return (t * sxy - sx * sy) / (t * sxx - sx * sx);
}

/// Least-squares slope of log(y) against log(x) over all points.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::nan("");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double t = static_cast<double>(n);
  return (t * sxy - sx * sy) / (t * sxx - sx * sx);
}

/// Runs jobs 0..count-1 on a bounded pool. Each job writes only its own slot,
/// so results come back in index order regardless of scheduling.
inline void run_jobs(std::size_t count, int threads, const std::function<void(std::size_t)>& job) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            job(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct RunSettings {
  QuadratureSettings load_quad = QuadratureSettings::load_default();
  QuadratureSettings error_quad = QuadratureSettings::error_default();
  SolveOptions solver{};
  int threads = 1;
};

/// Mesh, topology and σ-free matrices for one T_{1/m}; reused across k and σ.
struct Discretization {
  TriangleMesh mesh;
  std::vector<Edge> edges;
  ComponentMatrices components;

  explicit Discretization(int m) : mesh(build_hexagon_mesh(m)), edges(extract_edges(mesh)) {
    components = assemble_components(mesh, edges);
  }
};

/// Benchmark solve on one discretisation.
struct BenchmarkSolve {
  ComplexVector solution;
  SolveReport report;
};

inline BenchmarkSolve solve_benchmark(const Discretization& d, double k, Complex sigma, const RunSettings& settings,
                                      const ComplexVector* load = nullptr) {
  ComplexVector b = load ? *load : assemble_load(d.mesh, d.edges, BenchmarkProblem(k).data(), settings.load_quad);
  const SparseComplexSystem sys = compose_system(d.components, k, sigma, std::move(b));
  SolveReport report = solve(sys, settings.solver);
  return {report.solution, std::move(report)};
}

enum class Method { interpolant, cip, fem };

inline std::string to_string(Method method) {
  switch (method) {
    case Method::interpolant: return "interpolant";
    case Method::cip: return "cip";
    case Method::fem: return "fem";
  }
  return "unknown";
}

/// Error of one method at (k, m). σ is ignored for the interpolant and FEM.
inline ErrorReport benchmark_error(const Discretization& d, double k, Method method, Complex sigma,
                                   const RunSettings& settings) {
  const BenchmarkProblem problem(k);
  const ExactSolution exact = problem.exact();
  ComplexVector uh;
  Complex s{0.0, 0.0};
  switch (method) {
    case Method::interpolant: uh = interpolate(d.mesh, exact.u); break;
    case Method::cip: uh = solve_benchmark(d, k, sigma, settings).solution; s = sigma; break;
    case Method::fem: uh = solve_benchmark(d, k, Complex(0.0, 0.0), settings).solution; break;
  }
  return error_norms(d.mesh, d.components.penalty, uh, exact, s, settings.error_quad, reference_exact_norms(k));
}

// ---------------------------------------------------------------------------
// Stability sweep

struct StabilityRow {
  double k = 0.0;
  double h = 0.0;
  int m = 0;
  double grad_uh = std::nan("");
  double grad_fem = std::nan("");
  double grad_exact = 0.0;
  double c_sta = 0.0;
  std::string failure;  // solver failure message, empty on success
};

/// For each k: ‖∇u_h‖ (given σ), ‖∇u_h^FEM‖, ‖∇u‖ and C_sta. The mesh is
/// either fixed (m) or follows kh.
inline std::vector<StabilityRow> run_stability_sweep(const std::vector<double>& ks, std::optional<int> fixed_m,
                                                     std::optional<double> kh, Complex sigma,
                                                     const RunSettings& settings) {
  if (!fixed_m && !kh) throw Error(ErrorKind::invalid_argument, "stability: need a fixed m or a kh rule");
  std::vector<StabilityRow> rows(ks.size());
  run_jobs(ks.size(), settings.threads, [&](std::size_t i) {
    const double k = ks[i];
    StabilityRow& row = rows[i];
    row.k = k;
    row.m = fixed_m ? *fixed_m : mesh_index_for_kh(k, *kh);
    row.h = 1.0 / row.m;
    row.grad_exact = reference_exact_norms(k).h1_semi;
    row.c_sta = stability_constant(k, row.h, std::abs(sigma));
    const Discretization d(row.m);
    const ComplexVector b = assemble_load(d.mesh, d.edges, BenchmarkProblem(k).data(), settings.load_quad);
    try {
      row.grad_uh = discrete_norms(d.components, solve_benchmark(d, k, sigma, settings, &b).solution).h1_semi;
    } catch (const Error& e) {
      row.failure = std::string("cip: ") + e.what();
    }
    try {
      row.grad_fem = discrete_norms(d.components, solve_benchmark(d, k, {0.0, 0.0}, settings, &b).solution).h1_semi;
    } catch (const Error& e) {
      row.failure += (row.failure.empty() ? "" : "; ") + std::string("fem: ") + e.what();
    }
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Convergence study

struct ConvergenceRow {
  double k = 0.0;
  int m = 0;
  double h = 0.0;
  long long dofs = 0;
  ErrorReport cip;
  ErrorReport fem;
  ErrorReport interpolant;
};

struct ConvergenceSlopes {
  double k = 0.0;
  double h1_cip = 0.0, h1_fem = 0.0, h1_interpolant = 0.0;
  double l2_cip = 0.0, l2_fem = 0.0, l2_interpolant = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;  // sorted by (k, m)
  std::vector<ConvergenceSlopes> slopes;
};

inline ConvergenceStudy run_convergence_study(const std::vector<double>& ks, std::vector<int> ms, Complex sigma,
                                              const RunSettings& settings) {
  std::sort(ms.begin(), ms.end());
  ConvergenceStudy study;
  study.rows.resize(ks.size() * ms.size());
  run_jobs(study.rows.size(), settings.threads, [&](std::size_t idx) {
    const double k = ks[idx / ms.size()];
    const int m = ms[idx % ms.size()];
    const Discretization d(m);
    ConvergenceRow& row = study.rows[idx];
    row.k = k;
    row.m = m;
    row.h = 1.0 / m;
    row.dofs = dof_count(m);
    row.cip = benchmark_error(d, k, Method::cip, sigma, settings);
    row.fem = benchmark_error(d, k, Method::fem, sigma, settings);
    row.interpolant = benchmark_error(d, k, Method::interpolant, sigma, settings);
  });
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    std::vector<double> h, c1, f1, i1, c2, f2, i2;
    for (std::size_t mi = 0; mi < ms.size(); ++mi) {
      const ConvergenceRow& r = study.rows[ki * ms.size() + mi];
      // Fits run in decreasing h so the tail is the finest meshes.
      h.push_back(r.h);
      c1.push_back(r.cip.h1_semi_rel);
      f1.push_back(r.fem.h1_semi_rel);
      i1.push_back(r.interpolant.h1_semi_rel);
      c2.push_back(r.cip.l2_rel);
      f2.push_back(r.fem.l2_rel);
      i2.push_back(r.interpolant.l2_rel);
    }
    study.slopes.push_back({ks[ki], tail_slope(h, c1), tail_slope(h, f1), tail_slope(h, i1), tail_slope(h, c2),
                            tail_slope(h, f2), tail_slope(h, i2)});
  }
  return study;
}

// ---------------------------------------------------------------------------
// Critical mesh size

struct CriticalMeshResult {
  double k = 0.0;
  double epsilon = 0.0;
  double h = 0.0;
  int m_critical = 0;
  double error = 0.0;       // relative H1-seminorm error at m_critical
  double error_prev = 0.0;  // at m_critical - 1 (NaN when m_critical == 1)
  long long dofs = 0;
};

/// Smallest m (largest h = 1/m) whose relative H1-seminorm error is <= ε.
/// The search starts at kh = 2, brackets the crossing by multiplicative steps
/// (at most doubling) and then bisects on integer m. The crossing is verified
/// at m* - 1.
inline CriticalMeshResult find_critical_mesh(double k, double epsilon, int m_max, Method method, Complex sigma,
                                             const RunSettings& settings) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorKind::invalid_argument, "critical-h: eps must lie in (0, 1)");
  if (m_max < 1) throw Error(ErrorKind::invalid_argument, "critical-h: m_max must be >= 1");
  std::map<int, double> cache;
  const auto error_at = [&](int m) {
    if (auto it = cache.find(m); it != cache.end()) return it->second;
    const double e = benchmark_error(Discretization(m), k, method, sigma, settings).h1_semi_rel;
    cache.emplace(m, e);
    return e;
  };
  int lo = 0;  // error(lo) > ε, 0 meaning "none yet"
  int hi = std::min(m_max, std::max(1, static_cast<int>(std::ceil(k / 2.0))));
  if (error_at(hi) <= epsilon) {
    while (hi > 1) {
      const int m = hi / 2;
      if (error_at(m) <= epsilon) {
        hi = m;
      } else {
        lo = m;
        break;
      }
    }
  } else {
    lo = hi;
    for (;;) {
      if (lo >= m_max) {
        throw Error(ErrorKind::not_found, "critical-h: no m <= " + std::to_string(m_max) + " reaches relative error " +
                                              std::to_string(epsilon) + " at k = " + std::to_string(k));
      }
      // Grow by the factor an O(h²) error model predicts, between 1x and 2x.
      const double factor = std::clamp(1.1 * std::sqrt(error_at(lo) / epsilon), 1.0, 2.0);
      const int m = std::min(m_max, std::max(lo + 1, static_cast<int>(std::ceil(lo * factor))));
      if (error_at(m) <= epsilon) {
        hi = m;
        break;
      }
      lo = m;
    }
  }
  while (lo > 0 && hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (error_at(mid) <= epsilon) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  CriticalMeshResult r;
  r.k = k;
  r.epsilon = epsilon;
  r.m_critical = hi;
  r.h = 1.0 / hi;
  r.error = error_at(hi);
  r.error_prev = hi > 1 ? error_at(hi - 1) : std::nan("");
  r.dofs = dof_count(hi);
  return r;
}

inline std::vector<CriticalMeshResult> critical_mesh_sweep(const std::vector<double>& ks, double epsilon, int m_max,
                                                           Method method, Complex sigma, const RunSettings& settings) {
  std::vector<CriticalMeshResult> out(ks.size());
  run_jobs(ks.size(), settings.threads,
           [&](std::size_t i) { out[i] = find_critical_mesh(ks[i], epsilon, m_max, method, sigma, settings); });
  return out;
}

// ---------------------------------------------------------------------------
// DOF table

struct DofTableCell {
  double k = 0.0;
  Method method = Method::interpolant;
  std::optional<CriticalMeshResult> result;  // empty when the budget is exhausted
};

inline std::vector<DofTableCell> dof_table(double epsilon, const std::vector<double>& ks,
                                           const std::vector<Method>& methods, int m_max, Complex sigma,
                                           const RunSettings& settings) {
  std::vector<DofTableCell> cells(ks.size() * methods.size());
  run_jobs(cells.size(), settings.threads, [&](std::size_t i) {
    DofTableCell& cell = cells[i];
    cell.k = ks[i / methods.size()];
    cell.method = methods[i % methods.size()];
    try {
      cell.result = find_critical_mesh(cell.k, epsilon, m_max, cell.method, sigma, settings);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::not_found) throw;
    }
  });
  return cells;
}

// ---------------------------------------------------------------------------
// Penalty-parameter studies

struct GammaSweepRow {
  Complex sigma;
  ErrorReport error;
};

inline std::vector<GammaSweepRow> gamma_sweep(double k, int m, const std::vector<Complex>& sigmas,
                                              const RunSettings& settings) {
  const Discretization d(m);
  const BenchmarkProblem problem(k);
  const ComplexVector b = assemble_load(d.mesh, d.edges, problem.data(), settings.load_quad);
  std::vector<GammaSweepRow> rows(sigmas.size());
  run_jobs(sigmas.size(), settings.threads, [&](std::size_t i) {
    const ComplexVector uh = solve_benchmark(d, k, sigmas[i], settings, &b).solution;
    rows[i] = {sigmas[i], error_norms(d.mesh, d.components.penalty, uh, problem.exact(), sigmas[i],
                                      settings.error_quad, reference_exact_norms(k))};
  });
  return rows;
}

struct FemLimitRow {
  double gamma = 0.0;
  double h1_difference = 0.0;  // ‖u_h^γ - u_h^FEM‖_{H1}
  double ratio = std::nan("");  // previous difference / this one
};

/// ‖u_h^γ - u_h^FEM‖_{H1} for σ = iγ along a decreasing γ sequence.
inline std::vector<FemLimitRow> fem_limit_test(double k, int m, const std::vector<double>& gammas,
                                               const RunSettings& settings) {
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (gammas[i] < 0.0 || (i > 0 && !(gammas[i] < gammas[i - 1]))) {
      throw Error(ErrorKind::invalid_argument, "fem-limit: gamma sequence must be non-negative and strictly decreasing");
    }
  }
  const Discretization d(m);
  const ComplexVector b = assemble_load(d.mesh, d.edges, BenchmarkProblem(k).data(), settings.load_quad);
  const ComplexVector fem = solve_benchmark(d, k, {0.0, 0.0}, settings, &b).solution;
  std::vector<FemLimitRow> rows;
  for (double gamma : gammas) {
    const ComplexVector uh = solve_benchmark(d, k, Complex(0.0, gamma), settings, &b).solution;
    const ExactNorms n = discrete_norms(d.components, uh - fem);
    FemLimitRow row{gamma, std::sqrt(n.h1_semi * n.h1_semi + n.l2 * n.l2)};
    if (!rows.empty() && row.h1_difference > 0.0) row.ratio = rows.back().h1_difference / row.h1_difference;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV output

namespace csv {

inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Writes `# helmholtz-cip v1 <kind>`, the column header and the rows.
inline void write(const std::string& path, const std::string& kind, const std::string& header,
                  const std::vector<std::string>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_failure, "csv: cannot open '" + path + "' for writing");
  out << "# helmholtz-cip v1 " << kind << '\n' << header << '\n';
  for (const auto& r : rows) out << r << '\n';
  if (!out) throw Error(ErrorKind::io_failure, "csv: write failed for '" + path + "'");
}

}  // namespace csv

inline std::vector<std::string> stability_csv(const std::vector<StabilityRow>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows)
    out.push_back(csv::num(r.k) + "," + csv::num(r.h) + "," + csv::num(r.grad_uh) + "," + csv::num(r.grad_fem) + "," +
                  csv::num(r.grad_exact) + "," + csv::num(r.c_sta));
  return out;
}

inline std::vector<std::string> convergence_csv(const ConvergenceStudy& s) {
  std::vector<std::string> out;
  for (const auto& r : s.rows)
    out.push_back(csv::num(r.k) + "," + std::to_string(r.m) + "," + csv::num(r.h) + "," + std::to_string(r.dofs) + "," +
                  csv::num(r.cip.h1_semi_rel) + "," + csv::num(r.fem.h1_semi_rel) + "," +
                  csv::num(r.interpolant.h1_semi_rel) + "," + csv::num(r.cip.l2_rel) + "," +
                  csv::num(r.fem.l2_rel) + "," + csv::num(r.interpolant.l2_rel) + "," + csv::num(r.cip.broken_rel));
  return out;
}

inline std::vector<std::string> slopes_csv(const ConvergenceStudy& s) {
  std::vector<std::string> out;
  for (const auto& r : s.slopes)
    out.push_back(csv::num(r.k) + "," + csv::num(r.h1_cip) + "," + csv::num(r.h1_fem) + "," +
                  csv::num(r.h1_interpolant) + "," + csv::num(r.l2_cip) + "," + csv::num(r.l2_fem) + "," +
                  csv::num(r.l2_interpolant));
  return out;
}

inline std::vector<std::string> critical_csv(const std::vector<CriticalMeshResult>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows)
    out.push_back(csv::num(r.k) + "," + csv::num(r.epsilon) + "," + csv::num(r.h) + "," + std::to_string(r.m_critical) +
                  "," + std::to_string(r.dofs) + "," + csv::num(r.error) + "," + csv::num(r.error_prev));
  return out;
}

inline std::vector<std::string> dof_table_csv(const std::vector<DofTableCell>& cells) {
  std::vector<std::string> out;
  for (const auto& c : cells) {
    if (c.result) {
      out.push_back(csv::num(c.k) + "," + to_string(c.method) + "," + std::to_string(c.result->m_critical) + "," +
                    std::to_string(c.result->dofs) + "," + csv::num(c.result->error));
    } else {
      out.push_back(csv::num(c.k) + "," + to_string(c.method) + ",,,budget_exhausted");
    }
  }
  return out;
}

inline std::vector<std::string> gamma_sweep_csv(double k, int m, const std::vector<GammaSweepRow>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows)
    out.push_back(csv::num(k) + "," + std::to_string(m) + "," + csv::num(r.sigma.real()) + "," +
                  csv::num(r.sigma.imag()) + "," + csv::num(r.error.h1_semi_rel) + "," + csv::num(r.error.l2_rel) +
                  "," + csv::num(r.error.broken_rel));
  return out;
}

inline std::vector<std::string> fem_limit_csv(double k, int m, const std::vector<FemLimitRow>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows)
    out.push_back(csv::num(k) + "," + std::to_string(m) + "," + csv::num(r.gamma) + "," + csv::num(r.h1_difference) +
                  "," + csv::num(r.ratio));
  return out;
}

}  // namespace helmholtz_cip
