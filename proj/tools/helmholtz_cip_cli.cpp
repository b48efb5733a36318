// helmholtz-cip: experiment driver. Every subcommand writes plot-ready CSV
// into --out plus a <file>.meta.json sidecar.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "helmholtz_cip/experiments.hpp"

namespace hc = helmholtz_cip;
using nlohmann::json;

namespace {

struct Shared {
  double k = 10.0;
  std::optional<int> m;
  std::optional<double> kh;
  double gamma_re = 0.0;
  double gamma_im = 0.1;
  int quad_degree = 8;
  int quad_subdiv = 2;
  int load_quad_degree = 5;
  int load_quad_subdiv = 1;
  std::string solver = "direct";
  double tol = 1e-10;
  std::string out = ".";
  int threads = 1;
  bool export_mesh = false;
  bool export_matrix = false;
  bool sigma_given = false;

  hc::Complex sigma() const { return {gamma_re, gamma_im}; }

  int mesh_index() const {
    if (m) return *m;
    if (kh) return hc::mesh_index_for_kh(k, *kh);
    throw hc::Error(hc::ErrorKind::invalid_argument, "this subcommand needs --m or --kh");
  }

  hc::RunSettings settings() const {
    hc::RunSettings s;
    s.error_quad = {quad_degree, quad_subdiv, hc::QuadratureSettings::error_default().edge_points};
    s.load_quad = {load_quad_degree, load_quad_subdiv, hc::QuadratureSettings::load_default().edge_points};
    s.solver.tolerance = tol;
    s.solver.method = solver == "iterative" ? hc::SolverMethod::iterative : hc::SolverMethod::direct;
    s.threads = threads;
    return s;
  }

  json to_json() const {
    json j{{"k", k},
           {"gamma_re", gamma_re},
           {"gamma_im", gamma_im},
           {"quad_degree", quad_degree},
           {"quad_subdiv", quad_subdiv},
           {"load_quad_degree", load_quad_degree},
           {"load_quad_subdiv", load_quad_subdiv},
           {"solver", solver},
           {"tol", tol},
           {"threads", threads}};
    if (m) j["m"] = *m;
    if (kh) j["kh"] = *kh;
    return j;
  }
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Output {
 public:
  Output(const Shared& shared, std::string command, json params)
      : shared_(shared), command_(std::move(command)), params_(std::move(params)) {
    std::error_code ec;
    std::filesystem::create_directories(shared.out, ec);
    if (ec) throw hc::Error(hc::ErrorKind::io_failure, "cannot create output directory '" + shared.out + "'");
  }

  std::string path(const std::string& name) const { return (std::filesystem::path(shared_.out) / name).string(); }

  void csv(const std::string& name, const std::string& header, const std::vector<std::string>& rows) {
    hc::csv::write(path(name), command_, header, rows);
    json meta{{"tool", "helmholtz-cip"}, {"format", "helmholtz-cip v1"}, {"kind", command_},
              {"file", name},            {"rows", rows.size()},        {"created_utc", utc_timestamp()},
              {"shared", shared_.to_json()}, {"parameters", params_}};
    std::ofstream out(path(name) + ".meta.json");
    out << meta.dump(2) << '\n';
    if (!out) throw hc::Error(hc::ErrorKind::io_failure, "cannot write metadata for '" + name + "'");
    std::cout << path(name) << '\n';
  }

 private:
  const Shared& shared_;
  std::string command_;
  json params_;
};

void maybe_export(const Shared& s, const Output& out, const hc::Discretization& d) {
  if (s.export_mesh) hc::export_mesh(d.mesh, out.path("mesh.txt"));
  if (s.export_matrix) hc::export_matrix(hc::compose_matrix(d.components, s.k, s.sigma()), out.path("matrix.txt"));
}

hc::Method parse_method(const std::string& name) {
  if (name == "cip") return hc::Method::cip;
  if (name == "fem") return hc::Method::fem;
  if (name == "interpolant") return hc::Method::interpolant;
  throw hc::Error(hc::ErrorKind::invalid_argument, "unknown method '" + name + "'");
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi >= lo) || n < 1) throw hc::Error(hc::ErrorKind::invalid_argument, "bad k range");
  std::vector<double> ks;
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    ks.push_back(std::round(lo * std::pow(hi / lo, t)));
  }
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CIP-FEM and FEM experiments for the 2D Helmholtz benchmark on the unit hexagon"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file supplying any flag; the command line wins");

  Shared s;
  app.add_option("--k", s.k, "wave number")->check(CLI::PositiveNumber);
  app.add_option("--m", s.m, "mesh index, h = 1/m")->check(CLI::PositiveNumber);
  app.add_option("--kh", s.kh, "choose m = ceil(k/kh)")->check(CLI::PositiveNumber);
  auto* gre = app.add_option("--gamma-re", s.gamma_re, "real part of the penalty parameter");
  auto* gim = app.add_option("--gamma-im", s.gamma_im, "imaginary part of the penalty parameter");
  app.add_option("--quad-degree", s.quad_degree, "error-norm triangle rule degree")->check(CLI::IsMember({4, 5, 8}));
  app.add_option("--quad-subdiv", s.quad_subdiv, "error-norm quadrature subdivision")->check(CLI::PositiveNumber);
  app.add_option("--load-quad-degree", s.load_quad_degree, "load triangle rule degree")
      ->check(CLI::IsMember({1, 2, 4, 5, 8}));
  app.add_option("--load-quad-subdiv", s.load_quad_subdiv, "load quadrature subdivision")->check(CLI::PositiveNumber);
  app.add_option("--solver", s.solver, "linear solver")->check(CLI::IsMember({"direct", "iterative"}));
  app.add_option("--tol", s.tol, "relative residual tolerance");
  app.add_option("--out", s.out, "output directory");
  app.add_option("--threads", s.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_flag("--export-mesh", s.export_mesh, "also write mesh.txt");
  app.add_flag("--export-matrix", s.export_matrix, "also write matrix.txt (i j re im)");

  auto* solve_cmd = app.add_subcommand("solve", "solve one benchmark instance and report its errors");

  auto* conv_cmd = app.add_subcommand("convergence", "error against h for fixed k");
  std::vector<double> conv_ks{5.0};
  std::vector<int> conv_ms{8, 16, 32, 64};
  conv_cmd->add_option("--ks", conv_ks, "wave numbers");
  conv_cmd->add_option("--ms", conv_ms, "mesh indices");

  auto* stab_cmd = app.add_subcommand("stability", "gradient norms against k at fixed kh or fixed m");
  std::vector<double> stab_ks{50, 100, 150, 200, 250, 300};
  stab_cmd->add_option("--ks", stab_ks, "wave numbers");

  auto* crit_cmd = app.add_subcommand("critical-h", "largest h reaching a relative H1 error");
  double crit_eps = 0.5, crit_kmin = 10.0, crit_kmax = 100.0;
  int crit_count = 20, crit_mmax = 300;
  std::vector<double> crit_ks;
  std::string crit_method = "fem";
  crit_cmd->add_option("--eps", crit_eps, "target relative H1-seminorm error");
  crit_cmd->add_option("--ks", crit_ks, "explicit wave numbers (overrides the range)");
  crit_cmd->add_option("--k-min", crit_kmin, "smallest k of the log-spaced range");
  crit_cmd->add_option("--k-max", crit_kmax, "largest k of the log-spaced range");
  crit_cmd->add_option("--k-count", crit_count, "number of log-spaced k values");
  crit_cmd->add_option("--m-max", crit_mmax, "mesh budget");
  crit_cmd->add_option("--method", crit_method, "fem, cip or interpolant")
      ->check(CLI::IsMember({"fem", "cip", "interpolant"}));

  auto* dof_cmd = app.add_subcommand("dof-table", "DOFs needed for a relative H1 error");
  double dof_eps = 0.3;
  int dof_mmax = 300;
  std::vector<double> dof_ks{10.0, 50.0};
  std::vector<std::string> dof_methods{"interpolant", "cip", "fem"};
  dof_cmd->add_option("--eps", dof_eps, "target relative H1-seminorm error");
  dof_cmd->add_option("--ks", dof_ks, "wave numbers");
  dof_cmd->add_option("--methods", dof_methods, "methods")->check(CLI::IsMember({"fem", "cip", "interpolant"}));
  dof_cmd->add_option("--m-max", dof_mmax, "mesh budget");

  auto* gamma_cmd = app.add_subcommand("gamma-sweep", "errors over a list of penalty parameters");
  std::vector<std::pair<double, double>> sweep_sigmas{{0.0, 0.0}, {0.0, 0.1}, {-0.07, 0.01}};
  gamma_cmd->add_option("--sigma", sweep_sigmas, "penalty parameter as 're im' (repeatable)");

  auto* limit_cmd = app.add_subcommand("fem-limit", "distance to the FEM solution as gamma decreases");
  std::vector<double> limit_gammas{1e-2, 1e-3, 1e-4, 1e-5};
  limit_cmd->add_option("--gammas", limit_gammas, "strictly decreasing imaginary parts");

  auto* trace_cmd = app.add_subcommand("trace", "sample the discrete and exact solution along a segment");
  std::vector<double> trace_from{-1.0, 0.0}, trace_to{1.0, 0.0};
  int trace_samples = 401;
  trace_cmd->add_option("--from", trace_from, "segment start x y")->expected(2);
  trace_cmd->add_option("--to", trace_to, "segment end x y")->expected(2);
  trace_cmd->add_option("--samples", trace_samples, "number of samples")->check(CLI::Range(2, 10000000));

  auto* surface_cmd = app.add_subcommand("export-surface", "write the discrete solution at every vertex");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }
  s.sigma_given = gim->count() + gre->count() > 0;

  try {
    const hc::RunSettings settings = s.settings();
    // Table-style sweeps default to the tuned parameter unless one is given.
    const hc::Complex table_sigma = s.sigma_given ? s.sigma() : hc::sigma_tuned;

    if (solve_cmd->parsed()) {
      const int m = s.mesh_index();
      const hc::Discretization d(m);
      Output out(s, "solve", json{{"m", m}});
      maybe_export(s, out, d);
      const hc::BenchmarkSolve r = hc::solve_benchmark(d, s.k, s.sigma(), settings);
      const hc::ErrorReport e = hc::error_norms(d.mesh, d.components.penalty, r.solution,
                                                hc::BenchmarkProblem(s.k).exact(), s.sigma(), settings.error_quad,
                                                hc::reference_exact_norms(s.k));
      using hc::csv::num;
      out.csv("solve.csv", "k,m,dofs,sigma_re,sigma_im,h1_rel,l2_rel,broken_rel,residual,iterations,seconds",
              {num(s.k) + "," + std::to_string(m) + "," + std::to_string(hc::dof_count(m)) + "," + num(s.gamma_re) +
               "," + num(s.gamma_im) + "," + num(e.h1_semi_rel) + "," + num(e.l2_rel) + "," + num(e.broken_rel) + "," +
               num(r.report.relative_residual) + "," + std::to_string(r.report.iterations) + "," +
               num(r.report.seconds)});
    } else if (conv_cmd->parsed()) {
      Output out(s, "convergence", json{{"ks", conv_ks}, {"ms", conv_ms}});
      const hc::ConvergenceStudy study = hc::run_convergence_study(conv_ks, conv_ms, s.sigma(), settings);
      out.csv("convergence.csv", "k,m,h,dofs,h1_cip,h1_fem,h1_interp,l2_cip,l2_fem,l2_interp,broken_cip",
              hc::convergence_csv(study));
      out.csv("convergence_slopes.csv", "k,h1_cip,h1_fem,h1_interp,l2_cip,l2_fem,l2_interp", hc::slopes_csv(study));
    } else if (stab_cmd->parsed()) {
      if (!s.m && !s.kh) s.kh = 1.0;
      Output out(s, "stability", json{{"ks", stab_ks}});
      const auto rows = hc::run_stability_sweep(stab_ks, s.m, s.m ? std::nullopt : s.kh, s.sigma(), settings);
      out.csv("stability.csv", "k,h,grad_uh,grad_fem,grad_exact,c_sta", hc::stability_csv(rows));
      for (const auto& r : rows)
        if (!r.failure.empty()) std::cerr << json{{"warning", "solver_failure"}, {"k", r.k}, {"message", r.failure}}.dump() << '\n';
    } else if (crit_cmd->parsed()) {
      const std::vector<double> ks = crit_ks.empty() ? log_spaced(crit_kmin, crit_kmax, crit_count) : crit_ks;
      const hc::Method method = parse_method(crit_method);
      Output out(s, "critical-h", json{{"ks", ks}, {"eps", crit_eps}, {"method", crit_method}, {"m_max", crit_mmax}});
      const auto rows = hc::critical_mesh_sweep(ks, crit_eps, crit_mmax, method, table_sigma, settings);
      out.csv("critical_h_" + crit_method + ".csv", "k,eps,h,m,dofs,error,error_prev", hc::critical_csv(rows));
    } else if (dof_cmd->parsed()) {
      std::vector<hc::Method> methods;
      for (const auto& name : dof_methods) methods.push_back(parse_method(name));
      Output out(s, "dof-table", json{{"ks", dof_ks}, {"eps", dof_eps}, {"methods", dof_methods}, {"m_max", dof_mmax}});
      const auto cells = hc::dof_table(dof_eps, dof_ks, methods, dof_mmax, table_sigma, settings);
      out.csv("dof_table.csv", "k,method,m,dofs,error", hc::dof_table_csv(cells));
    } else if (gamma_cmd->parsed()) {
      const int m = s.mesh_index();
      std::vector<hc::Complex> sigmas;
      for (const auto& [re, im] : sweep_sigmas) sigmas.emplace_back(re, im);
      Output out(s, "gamma-sweep", json{{"m", m}, {"sigmas", sweep_sigmas}});
      const auto rows = hc::gamma_sweep(s.k, m, sigmas, settings);
      out.csv("gamma_sweep.csv", "k,m,sigma_re,sigma_im,h1_rel,l2_rel,broken_rel", hc::gamma_sweep_csv(s.k, m, rows));
    } else if (limit_cmd->parsed()) {
      const int m = s.mesh_index();
      Output out(s, "fem-limit", json{{"m", m}, {"gammas", limit_gammas}});
      const auto rows = hc::fem_limit_test(s.k, m, limit_gammas, settings);
      out.csv("fem_limit.csv", "k,m,gamma,h1_difference,ratio", hc::fem_limit_csv(s.k, m, rows));
    } else if (trace_cmd->parsed() || surface_cmd->parsed()) {
      const int m = s.mesh_index();
      const hc::Discretization d(m);
      const hc::BenchmarkProblem problem(s.k);
      const bool trace = trace_cmd->parsed();
      Output out(s, trace ? "trace" : "export-surface",
                 trace ? json{{"m", m}, {"from", trace_from}, {"to", trace_to}, {"samples", trace_samples}}
                       : json{{"m", m}});
      maybe_export(s, out, d);
      const hc::ComplexVector uh = hc::solve_benchmark(d, s.k, s.sigma(), settings).solution;
      using hc::csv::num;
      std::vector<std::string> rows;
      if (trace) {
        const hc::Point a(trace_from[0], trace_from[1]), b(trace_to[0], trace_to[1]);
        for (const auto& t : hc::sample_trace(d.mesh, uh, a, b, trace_samples)) {
          const hc::Complex u = problem.u(t.point);
          rows.push_back(num(t.t) + "," + num(t.point.x()) + "," + num(t.point.y()) + "," + num(t.value.real()) + "," +
                         num(t.value.imag()) + "," + num(u.real()) + "," + num(u.imag()));
        }
        out.csv("trace.csv", "t,x,y,re,im,re_exact,im_exact", rows);
      } else {
        for (std::size_t i = 0; i < d.mesh.num_vertices(); ++i) {
          const hc::Point& p = d.mesh.vertices[i];
          rows.push_back(num(p.x()) + "," + num(p.y()) + "," + num(uh[static_cast<Eigen::Index>(i)].real()) + "," + num(uh[static_cast<Eigen::Index>(i)].imag()));
        }
        out.csv("surface.csv", "x,y,re,im", rows);
      }
    }
  } catch (const hc::Error& e) {
    print_error(std::string(hc::to_string(e.kind())), e.what());
    return 3;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 4;
  }
  return 0;
}
