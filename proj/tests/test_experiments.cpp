#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "helmholtz_cip/experiments.hpp"

namespace helmholtz_cip {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Config, MeshIndexFromKh) {
  EXPECT_EQ(mesh_index_for_kh(100.0, 0.5), 200);
  EXPECT_EQ(mesh_index_for_kh(10.0, 1.0), 10);
  EXPECT_EQ(mesh_index_for_kh(10.5, 1.0), 11);
  EXPECT_EQ(mesh_index_for_kh(0.2, 1.0), 1);
  EXPECT_THROW(mesh_index_for_kh(1.0, 0.0), Error);
}

TEST(Config, StabilityConstantAtUnitKh) {
  for (double k : {1.0, 7.0, 50.0, 500.0}) EXPECT_NEAR(stability_constant(k, 1.0 / k, 0.1), 12.0 / k, 1e-12 / k);
}

TEST(Slopes, TailFitUsesLastHalf) {
  // Plateau then exact slope -1 on the last three of five points.
  const std::vector<double> h{1.0, 0.5, 0.25, 0.125, 0.0625};
  const std::vector<double> e{1.0, 1.0, 0.25, 0.125, 0.0625};
  EXPECT_NEAR(tail_slope(h, e), 1.0, 1e-12);
  EXPECT_NEAR(loglog_slope({1, 2, 4}, {1, 4, 16}), 2.0, 1e-12);
}

TEST(Pool, ResultsIndependentOfThreadCount) {
  std::vector<double> one(17), many(17);
  run_jobs(17, 1, [&](std::size_t i) { one[i] = std::sqrt(static_cast<double>(i)); });
  run_jobs(17, 4, [&](std::size_t i) { many[i] = std::sqrt(static_cast<double>(i)); });
  EXPECT_EQ(one, many);
  EXPECT_THROW(run_jobs(3, 2, [](std::size_t i) { if (i == 1) throw Error(ErrorKind::not_found, "x"); }), Error);
}

TEST(CriticalMesh, BracketInvariantAndBudgetsAtK10) {
  RunSettings settings;
  const CriticalMeshResult interp = find_critical_mesh(10.0, 0.3, 100, Method::interpolant, {}, settings);
  const CriticalMeshResult cip = find_critical_mesh(10.0, 0.3, 100, Method::cip, sigma_tuned, settings);
  const CriticalMeshResult fem = find_critical_mesh(10.0, 0.3, 100, Method::fem, {}, settings);
  for (const auto& r : {interp, cip, fem}) {
    EXPECT_LE(r.error, 0.3);
    EXPECT_GT(r.error_prev, 0.3);
    EXPECT_EQ(r.dofs, dof_count(r.m_critical));
    EXPECT_DOUBLE_EQ(r.h, 1.0 / r.m_critical);
  }
  EXPECT_EQ(interp.dofs, 217);
  EXPECT_EQ(cip.dofs, 217);
  EXPECT_EQ(fem.dofs, 397);
}

TEST(CriticalMesh, BudgetExhaustionIsReported) {
  RunSettings settings;
  try {
    find_critical_mesh(30.0, 0.1, 20, Method::fem, {}, settings);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_found);
  }
  const auto cells = dof_table(0.1, {30.0}, {Method::fem}, 20, {}, settings);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_FALSE(cells[0].result.has_value());
  EXPECT_EQ(dof_table_csv(cells)[0], "30,fem,,,budget_exhausted");
}

TEST(CriticalMesh, WalksDownWhenStartAlreadyMeetsTolerance) {
  RunSettings settings;
  const CriticalMeshResult r = find_critical_mesh(2.0, 0.9, 50, Method::interpolant, {}, settings);
  EXPECT_EQ(r.m_critical, 1);
  EXPECT_TRUE(std::isnan(r.error_prev));
}

TEST(DofTable, ValuesHaveLatticeForm) {
  RunSettings settings;
  const auto cells = dof_table(0.3, {5.0, 10.0}, {Method::interpolant, Method::fem}, 100, sigma_tuned, settings);
  ASSERT_EQ(cells.size(), 4u);
  for (const auto& c : cells) {
    ASSERT_TRUE(c.result);
    const long long m = c.result->m_critical;
    EXPECT_EQ(c.result->dofs, 3 * m * m + 3 * m + 1);
  }
}

TEST(GammaSweep, ZeroPenaltyRowEqualsFemBitwise) {
  RunSettings settings;
  const auto rows = gamma_sweep(10.0, 12, {Complex(0.0, 0.0), sigma_stability, sigma_tuned}, settings);
  const Discretization d(12);
  const ErrorReport fem = benchmark_error(d, 10.0, Method::fem, {}, settings);
  EXPECT_EQ(rows[0].error.h1_semi_abs, fem.h1_semi_abs);
  EXPECT_EQ(rows[0].error.l2_abs, fem.l2_abs);
}

TEST(FemLimit, DifferenceIsLinearInGamma) {
  RunSettings settings;
  settings.solver.tolerance = 1e-12;
  const auto rows = fem_limit_test(10.0, 16, {1e-2, 1e-3, 1e-4, 1e-5}, settings);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(rows[i].ratio, 10.0, 2.0) << rows[i].gamma;
  EXPECT_THROW(fem_limit_test(10.0, 4, {1e-3, 1e-2}, settings), Error);
}

TEST(FemLimit, HalvingGammaHalvesDifference) {
  RunSettings settings;
  settings.solver.tolerance = 1e-12;
  std::vector<double> gammas;
  for (double g = 1e-2; g >= 1e-6; g /= 2) gammas.push_back(g);
  const auto rows = fem_limit_test(10.0, 16, gammas, settings);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(rows[i].ratio, 2.0, 0.2) << rows[i].gamma;
}

TEST(Stability, UnitKhRows) {
  RunSettings settings;
  const auto rows = run_stability_sweep({10.0, 20.0, 30.0}, std::nullopt, 1.0, sigma_stability, settings);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.failure.empty()) << r.failure;
    EXPECT_NEAR(r.c_sta, 12.0 / r.k, 1e-12);
    EXPECT_EQ(r.m, static_cast<int>(r.k));
    EXPECT_GT(r.grad_exact, 0.5);
    EXPECT_LT(r.grad_exact, 2.0);
    EXPECT_GT(r.grad_uh, 0.0);
    EXPECT_GT(r.grad_fem, 0.0);
  }
  EXPECT_THROW(run_stability_sweep({1.0}, std::nullopt, std::nullopt, sigma_stability, settings), Error);
}

TEST(Convergence, FirstOrderTailAtK5) {
  RunSettings settings;
  const ConvergenceStudy s = run_convergence_study({5.0}, {32, 8, 16}, sigma_stability, settings);
  ASSERT_EQ(s.rows.size(), 3u);
  EXPECT_EQ(s.rows.front().m, 8);
  ASSERT_EQ(s.slopes.size(), 1u);
  EXPECT_NEAR(s.slopes[0].h1_interpolant, 1.0, 0.15);
  EXPECT_NEAR(s.slopes[0].h1_cip, 1.0, 0.15);
  for (const auto& r : s.rows) EXPECT_EQ(r.dofs, dof_count(r.m));
}

TEST(Pollution, CipUsableWhereFemIsNotAtK100) {
  RunSettings settings;
  const Discretization d(100);
  const double cip = benchmark_error(d, 100.0, Method::cip, sigma_stability, settings).h1_semi_rel;
  const double fem = benchmark_error(d, 100.0, Method::fem, {}, settings).h1_semi_rel;
  EXPECT_LT(cip, 1.0);
  EXPECT_GT(fem, 0.9);
}

TEST(Csv, OutputIsByteReproducible) {
  RunSettings settings;
  const auto dir = std::filesystem::path(::testing::TempDir());
  const std::string a = (dir / "helmholtz_cip_conv_a.csv").string();
  const std::string b = (dir / "helmholtz_cip_conv_b.csv").string();
  csv::write(a, "convergence", "k,m", convergence_csv(run_convergence_study({3.0}, {4, 6}, sigma_tuned, settings)));
  settings.threads = 2;
  csv::write(b, "convergence", "k,m", convergence_csv(run_convergence_study({3.0}, {4, 6}, sigma_tuned, settings)));
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(a).rfind("# helmholtz-cip v1 convergence\n", 0), 0u);
}

}  // namespace
}  // namespace helmholtz_cip
