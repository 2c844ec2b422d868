#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <cmath>

#include "maglev/ocp.hpp"
#include "test_helpers.hpp"

using namespace maglev;
using maglev::testing::TestRng;
using maglev::testing::default_system;
using maglev::testing::make_ocp;

namespace {

// Random scaled state inside the validity window (ds scale is 1e-2 m, so the
// window s in [2, 20] mm maps to x0 in [-0.8, 1.0]).
Eigen::Vector3d random_state(TestRng& rng) {
  return {rng.uniform(-0.7, 0.9), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("deviation output vanishes at the origin") {
  const auto sys = default_system();
  const auto ocp = make_ocp(sys);
  CHECK(ocp->output(Eigen::Vector3d::Zero()).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("stage cost values and structure") {
  const auto sys = default_system();
  const auto ocp = make_ocp(sys);
  CHECK(ocp->stage_cost(Eigen::Vector3d::Zero(), 0.0) == 0.0);
  CHECK(ocp->stage_cost(Eigen::Vector3d(1.0, 0.0, 0.0), 0.0) == doctest::Approx(75.0));
  CHECK(ocp->stage_cost(Eigen::Vector3d(0.0, 1.0, 0.0), 0.0) == doctest::Approx(15.0));
  CHECK(ocp->stage_cost(Eigen::Vector3d(0.0, 0.0, 1.0), 0.0) == doctest::Approx(5.0));
  CHECK(ocp->stage_cost(Eigen::Vector3d::Zero(), 2.0) == doctest::Approx(4.0));  // R u^2

  TestRng rng(5);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d y(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    CHECK(ocp->stage_cost(y, rng.uniform(-2, 2)) >= 0.0);
  }
}

TEST_CASE("input-cost gradient is 2Ru exactly") {
  const auto sys = default_system();
  const auto ocp = make_ocp(sys);
  TestRng rng(13);
  for (int i = 0; i < 20; ++i) {
    const double u = rng.uniform(-2.0, 2.0);
    const auto [dl_dx, dl_du] = ocp->cost_gradients(random_state(rng), u);
    (void)dl_dx;
    CHECK(dl_du == doctest::Approx(2.0 * sys.ocp.R * u).epsilon(1e-14));
  }
}

TEST_CASE("cost gradients match central finite differences") {
  const auto sys = default_system();
  const auto ocp = make_ocp(sys);
  TestRng rng(41);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d x = random_state(rng);
    const double u = rng.uniform(-1.0, 1.0);
    const auto [dl_dx, dl_du] = ocp->cost_gradients(x, u);
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const double fd = (ocp->stage_cost_xu(xp, u) - ocp->stage_cost_xu(xm, u)) / (2 * h);
      CHECK(rel_err(dl_dx[j], fd) < 1e-5);
    }
    const double fd_u = (ocp->stage_cost_xu(x, u + h) - ocp->stage_cost_xu(x, u - h)) / (2 * h);
    CHECK(rel_err(dl_du, fd_u) < 1e-5);
  }
}

TEST_CASE("dynamics Jacobians match central finite differences") {
  const auto sys = default_system();
  const auto ocp = make_ocp(sys);
  TestRng rng(43);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d x = random_state(rng);
    const double u = rng.uniform(-1.0, 1.0);
    const auto [A, B] = ocp->dynamics_jacobians(x, u);
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const Eigen::Vector3d fd = (ocp->deriv(xp, u) - ocp->deriv(xm, u)) / (2 * h);
      for (int r = 0; r < 3; ++r) CHECK(rel_err(A(r, j), fd[r]) < 1e-5);
    }
    const Eigen::Vector3d fd_B = (ocp->deriv(x, u + h) - ocp->deriv(x, u - h)) / (2 * h);
    for (int r = 0; r < 3; ++r) CHECK(rel_err(B[r], fd_B[r]) < 1e-5);
  }
}

TEST_CASE("input enters only through the current channel") {
  const auto sys = default_system();
  const auto ocp = make_ocp(sys);
  TestRng rng(47);
  for (int i = 0; i < 20; ++i) {
    const auto [A, B] = ocp->dynamics_jacobians(random_state(rng), rng.uniform(-1, 1));
    (void)A;
    CHECK(B[0] == 0.0);
    CHECK(B[1] == 0.0);
    CHECK(B[2] != 0.0);
  }
}

TEST_CASE("output Jacobian has unit selector rows for gap and current") {
  const auto sys = default_system();
  const auto ocp = make_ocp(sys);
  TestRng rng(53);
  for (int i = 0; i < 10; ++i) {
    const Eigen::Matrix3d C = ocp->output_jacobian(random_state(rng));
    CHECK(C(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(C(0, 1) == 0.0);
    CHECK(C(0, 2) == 0.0);
    CHECK(C(2, 0) == 0.0);
    CHECK(C(2, 1) == 0.0);
    CHECK(C(2, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(C(1, 1) == 0.0);  // zdd does not depend on the gap rate
  }
}

TEST_CASE("output Jacobian matches central finite differences") {
  const auto sys = default_system();
  const auto ocp = make_ocp(sys);
  TestRng rng(59);
  const double h = 1e-6;
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d x = random_state(rng);
    const Eigen::Matrix3d C = ocp->output_jacobian(x);
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const Eigen::Vector3d fd = (ocp->output(xp) - ocp->output(xm)) / (2 * h);
      for (int r = 0; r < 3; ++r) CHECK(rel_err(C(r, j), fd[r]) < 1e-5);
    }
  }
}

TEST_CASE("input projection clamps to the shifted bounds") {
  const auto sys = default_system();
  const auto ocp = make_ocp(sys);
  const double lo = ocp->u_lower();
  const double hi = ocp->u_upper();
  CHECK(lo == doctest::Approx((sys.plant.u_min - sys.eq.U0) / 100.0).epsilon(1e-12));
  CHECK(hi == doctest::Approx((sys.plant.u_max - sys.eq.U0) / 100.0).epsilon(1e-12));
  CHECK(ocp->project_input(5.0) == hi);
  CHECK(ocp->project_input(-500.0) == lo);
  CHECK(ocp->project_input(0.5) == 0.5);
  TestRng rng(61);
  for (int i = 0; i < 20; ++i) {
    const double u = rng.uniform(-10.0, 10.0);
    const double p = ocp->project_input(u);
    CHECK(ocp->project_input(p) == p);  // idempotence
    CHECK(p >= lo);
    CHECK(p <= hi);
  }
}

TEST_CASE("rk4_step_sens sensitivities match finite differences of the step") {
  const auto sys = default_system();
  const auto ocp = make_ocp(sys);
  TestRng rng(67);
  const double h_step = 1e-3;
  const double h = 1e-6;
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d x = random_state(rng);
    const double u = rng.uniform(-1.0, 1.0);
    const StepSens s = rk4_step_sens(*ocp, x, u, h_step);
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const Eigen::Vector3d fd =
          (rk4_step_sens(*ocp, xp, u, h_step).x_next - rk4_step_sens(*ocp, xm, u, h_step).x_next) / (2 * h);
      for (int r = 0; r < 3; ++r) CHECK(rel_err(s.A(r, j), fd[r]) < 1e-5);
    }
    const Eigen::Vector3d fd_B =
        (rk4_step_sens(*ocp, x, u + h, h_step).x_next - rk4_step_sens(*ocp, x, u - h, h_step).x_next) / (2 * h);
    for (int r = 0; r < 3; ++r) CHECK(rel_err(s.B[r], fd_B[r]) < 1e-5);
  }
}

TEST_CASE("load estimate shifts the acceleration output") {
  const auto sys = default_system();
  const auto ocp = make_ocp(sys);
  const Eigen::Vector3d y0 = ocp->output(Eigen::Vector3d::Zero());
  ocp->set_load_estimate(0.1 * sys.plant.m * sys.plant.g);
  const Eigen::Vector3d y1 = ocp->output(Eigen::Vector3d::Zero());
  // y_zdd is scaled by g; a +10 % weight estimate adds 0.1 g of predicted
  // acceleration.
  CHECK(y1[1] - y0[1] == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(ocp->load_estimate() == doctest::Approx(0.1 * sys.plant.m * sys.plant.g));
}

TEST_CASE("configuration validation") {
  OcpConfig cfg;
  cfg.T = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = OcpConfig{};
  cfg.N = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = OcpConfig{};
  cfg.R = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = OcpConfig{};
  cfg.Q[1] = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = OcpConfig{};
  CHECK(cfg.delta_N() == doctest::Approx(0.002));
}
