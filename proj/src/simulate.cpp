#include "maglev/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "maglev/rk4.hpp"

namespace maglev {

SimLog run_closed_loop(const Scenario& scenario, const SystemConfig& sys) {
  scenario.validate();
  if (!sys.model) throw ConfigError("SystemConfig.model not set (call finalize())");

  const PlantParams& p = sys.plant;
  const Equilibrium& eq = sys.eq;
  const MagnetModel& model = *sys.model;
  const double v_mps = scenario.velocity_kmh / 3.6;
  const double delta = scenario.delta;
  const int steps = static_cast<int>(std::llround(scenario.duration / delta));

  auto disturbance = [&](double t) {
    DisturbanceSample d;
    std::tie(d.d_gw, d.d_gw_dot) = guideway_eval(t, v_mps, scenario.guideway);
    if (t >= scenario.load_step.time) d.d_load = scenario.load_step.force;
    return d;
  };

  auto controller = make_controller(scenario.controller, sys, delta);
  EstimatorConfig est_cfg = scenario.estimator;
  est_cfg.delta = delta;
  FilterState fs = estimator_reset(est_cfg);
  LoadEstimator le = make_load_estimator(p, scenario.k_s);

  PlantState state;
  {
    const DisturbanceSample d0 = disturbance(0.0);
    state.z = eq.s0 + d0.d_gw + (scenario.x0_set ? scenario.x0_ds : 0.0);
    state.zdot = d0.d_gw_dot + (scenario.x0_set ? scenario.x0_sdot : 0.0);
    state.I = eq.I0 + (scenario.x0_set ? scenario.x0_dI : 0.0);
  }

  std::mt19937_64 noise_rng(scenario.noise.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const bool with_noise =
      scenario.noise.sigma_s > 0 || scenario.noise.sigma_zdd > 0 || scenario.noise.sigma_I > 0;

  SimLog log;
  log.t.reserve(steps);

  const double h = delta / scenario.plant_substeps;
  for (int k = 0; k < steps; ++k) {
    const double t = k * delta;
    const DisturbanceSample d = disturbance(t);

    PlantOutput y;
    try {
      y = plant_output(state, d, p, model);
    } catch (const DivergenceError&) {
      log.verdict = SimVerdict::diverged;
      log.diverge_time = t;
      break;
    }
    if (with_noise) {
      y.s += scenario.noise.sigma_s * gauss(noise_rng);
      y.zdd += scenario.noise.sigma_zdd * gauss(noise_rng);
      y.I += scenario.noise.sigma_I * gauss(noise_rng);
    }

    SynthState x_hat;
    if (est_cfg.mode == EstimatorMode::ideal) {
      x_hat.ds = state.z - d.d_gw - eq.s0;
      x_hat.sdot = state.zdot - d.d_gw_dot;
      x_hat.dI = state.I - eq.I0;
    } else {
      const EstimateResult er = estimator_update(fs, y.s, y.zdd, y.I, eq, est_cfg);
      x_hat = er.x_hat;
      fs = er.fs;
    }

    if (scenario.load_estimator_enabled) {
      le = le.updated(y.s, eq.s0, delta);
      controller->set_load_estimate(p.F_load0 + le.d_hat);
    }

    const Controller::Output co = controller->compute(x_hat);
    const double u_applied = std::clamp(eq.U0 + co.du, p.u_min, p.u_max);

    log.t.push_back(t);
    log.s.push_back(y.s);
    log.zdd.push_back(y.zdd);
    log.I.push_back(y.I);
    log.u.push_back(u_applied);
    log.solve_time.push_back(co.wall_time);
    log.status.push_back(co.status);

    // Zero-order hold over the sampling period.
    try {
      auto f = [&](double tau, const Eigen::Vector3d& xv) {
        return plant_deriv(PlantState::from_vec(xv), u_applied, disturbance(tau), p, model).vec();
      };
      Eigen::Vector3d xv = state.vec();
      for (int i = 0; i < scenario.plant_substeps; ++i) xv = rk4_step_t(f, t + i * h, xv, h);
      state = PlantState::from_vec(xv);
    } catch (const DivergenceError&) {
      log.verdict = SimVerdict::diverged;
      log.diverge_time = t + delta;
      break;
    }

    if (scenario.early_exit_on_settle) {
      const Eigen::Vector3d xs = sys.ocp.scaling.scale_state(x_hat.vec());
      if (xs.lpNorm<Eigen::Infinity>() < 1e-4) break;  // settled at the origin
    }
  }
  return log;
}

}  // namespace maglev
