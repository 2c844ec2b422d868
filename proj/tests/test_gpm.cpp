#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <cmath>

#include "maglev/gpm.hpp"
#include "test_helpers.hpp"

using namespace maglev;
using maglev::testing::TestRng;
using maglev::testing::default_system;
using maglev::testing::make_ocp;

namespace {

std::vector<double> random_controls(TestRng& rng, int n, double lo, double hi) {
  std::vector<double> u(n);
  for (double& v : u) v = rng.uniform(lo, hi);
  return u;
}

}  // namespace

TEST_CASE("forward integration of zero controls from the origin stays at zero") {
  const auto sys = default_system();
  GpmSolver solver(make_ocp(sys), sys.gpm);
  const auto x = solver.forward_integrate(Eigen::Vector3d::Zero(), std::vector<double>(solver.grid_cells(), 0.0));
  REQUIRE(static_cast<int>(x.size()) == solver.grid_cells() + 1);
  for (const auto& v : x) CHECK(v.lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("forward integration matches the shooting interval map on shared controls") {
  const auto sys = default_system();
  auto ocp = make_ocp(sys);
  GpmSolver gpm(ocp, sys.gpm);
  ShootingSolver shooting(ocp, sys.sqp);

  // Default grid: M = N * substeps, so one shooting interval covers
  // `substeps` GPM cells at the same step width.
  const int sub = sys.ocp.rk_substeps;
  REQUIRE(gpm.grid_cells() == sys.ocp.N * sub);

  TestRng rng(83);
  const Eigen::Vector3d x0(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2));
  std::vector<double> u_nodes = random_controls(rng, sys.ocp.N, -0.5, 0.5);
  std::vector<double> u_cells(gpm.grid_cells());
  for (int i = 0; i < gpm.grid_cells(); ++i) u_cells[i] = u_nodes[i / sub];

  const auto x_gpm = gpm.forward_integrate(x0, u_cells);
  Eigen::Vector3d x_sh = x0;
  for (int k = 0; k < sys.ocp.N; ++k) {
    x_sh = shooting.interval_map(x_sh, u_nodes[k]);
    CHECK((x_gpm[(k + 1) * sub] - x_sh).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("costate of the zero trajectory is zero") {
  const auto sys = default_system();
  GpmSolver solver(make_ocp(sys), sys.gpm);
  const int M = solver.grid_cells();
  const std::vector<Eigen::Vector3d> x(M + 1, Eigen::Vector3d::Zero());
  const std::vector<double> u(M, 0.0);
  const auto lambda = solver.backward_costate(x, u);
  CHECK(lambda.back().norm() == 0.0);  // terminal condition
  for (const auto& l : lambda) CHECK(l.lpNorm<Eigen::Infinity>() < 1e-7);
}

TEST_CASE("control gradient matches finite differences of the discretized cost") {
  const auto sys = default_system();
  GpmSolver solver(make_ocp(sys), sys.gpm);
  const int M = solver.grid_cells();
  const double h_cell = solver.cell_width();
  TestRng rng(89);

  for (int traj = 0; traj < 10; ++traj) {
    const Eigen::Vector3d x0(rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15));
    std::vector<double> u = random_controls(rng, M, -0.4, 0.4);

    const auto x = solver.forward_integrate(x0, u);
    const auto lambda = solver.backward_costate(x, u);
    const auto grad = solver.control_gradient(x, lambda, u);

    // Probe three cells per trajectory (full FD of all cells is O(M^2)).
    for (int probe = 0; probe < 3; ++probe) {
      const int i = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(M));
      const double eps = 1e-6;
      std::vector<double> up = u, um = u;
      up[i] += eps;
      um[i] -= eps;
      const double Jp = solver.cost(solver.forward_integrate(x0, up), up);
      const double Jm = solver.cost(solver.forward_integrate(x0, um), um);
      const double fd = (Jp - Jm) / (2 * eps);
      // dJ/du_i = h * grad_i (grad is in cost-rate units).
      const double an = h_cell * grad[i];
      CHECK(std::abs(an - fd) < 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("gpm_solve at the origin converges immediately to zero input") {
  const auto sys = default_system();
  GpmSolver solver(make_ocp(sys), sys.gpm);
  const SolveResult r = solver.gpm_solve(Eigen::Vector3d::Zero());
  CHECK(r.status == SolveStatus::converged);
  for (double u : r.u) CHECK(std::abs(u) < 1e-7);
}

TEST_CASE("gpm_solve cost is non-increasing in the iteration budget") {
  const auto sys = default_system();
  const Eigen::Vector3d x0(0.25, 0.0, 0.1);
  double prev = std::numeric_limits<double>::infinity();
  for (int budget : {3, 10, 30, 100}) {
    GpmSettings settings = sys.gpm;
    settings.max_iter = budget;
    GpmSolver solver(make_ocp(sys), settings);
    const SolveResult r = solver.gpm_solve(x0);
    CHECK(std::isfinite(r.objective));
    CHECK(r.objective <= prev + 1e-12);
    prev = r.objective;
  }
}

TEST_CASE("every gpm iterate satisfies the input box") {
  const auto sys = default_system();
  auto ocp = make_ocp(sys);
  GpmSolver solver(ocp, sys.gpm);
  const SolveResult r = solver.gpm_solve(Eigen::Vector3d(0.4, 0.1, 0.3));
  for (double u : r.u) {
    CHECK(u >= ocp->u_lower() - 1e-15);
    CHECK(u <= ocp->u_upper() + 1e-15);
  }
}

TEST_CASE("a converged iterate is a fixed point of another solve") {
  const auto sys = default_system();
  GpmSolver solver(make_ocp(sys), sys.gpm);
  const Eigen::Vector3d x0(0.1, 0.0, 0.05);
  const SolveResult first = solver.gpm_solve(x0);
  REQUIRE(first.status == SolveStatus::converged);
  const SolveResult again = solver.gpm_solve(x0, &first.u);
  REQUIRE(again.status == SolveStatus::converged);
  double du = 0.0;
  for (size_t i = 0; i < first.u.size(); ++i) du = std::max(du, std::abs(first.u[i] - again.u[i]));
  // The stopping rule bounds the projected gradient (tol_pg), which leaves
  // the controls themselves determined to roughly tol_pg / gamma.
  CHECK(du < 1e-5);
}

TEST_CASE("long horizons with a fine grid fail gracefully, never crash") {
  auto sys = default_system();
  sys.ocp.T = 0.1;
  sys.ocp.N = 100;  // 1 ms cells
  sys.finalize();
  GpmSettings settings = sys.gpm;
  settings.max_iter = 50;
  GpmSolver solver(make_ocp(sys), settings);
  SolveResult r;
  CHECK_NOTHROW(r = solver.gpm_solve(Eigen::Vector3d(0.5, 0.0, 0.5)));
  CHECK((r.status == SolveStatus::converged || r.status == SolveStatus::max_iter ||
         r.status == SolveStatus::domain_error));
  if (r.status != SolveStatus::converged) CHECK(!r.message.empty());
}

TEST_CASE("warm-start shift repeats the tail control") {
  const auto sys = default_system();
  GpmSolver solver(make_ocp(sys), sys.gpm);
  const int M = solver.grid_cells();
  std::vector<double> u(M);
  for (int i = 0; i < M; ++i) u[i] = 0.01 * i;
  // delta = one sampling period = 1 ms = one grid cell at the default grid.
  const auto shifted = solver.shift(u, 1e-3);
  REQUIRE(static_cast<int>(shifted.size()) == M);
  for (int i = 0; i + 1 < M; ++i) CHECK(shifted[i] == doctest::Approx(u[i + 1]));
  CHECK(shifted[M - 1] == doctest::Approx(u[M - 1]));
}

TEST_CASE("settings validation") {
  GpmSettings s;
  s.max_iter = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = GpmSettings{};
  s.gamma0 = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = GpmSettings{};
  s.grid_M = 5;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}
