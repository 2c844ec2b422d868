#include "maglev/synthesis.hpp"

#include <algorithm>
#include <cmath>

namespace maglev {

Equilibrium find_equilibrium(const PlantParams& p, const MagnetModel& model, double s0) {
  const auto [I0, U0] = equilibrium(p, model, s0);
  return {s0, I0, U0};
}

Eigen::Vector3d synth_deriv(const SynthState& x, double u, double F_hat_load, const Equilibrium& eq,
                            const PlantParams& p, const MagnetModel& model) {
  const double s = eq.s0 + x.ds;
  if (s < p.s_guard_lo || s > p.s_guard_hi) {
    throw BoundsError("synthesis air gap left validity window", s, p.s_guard_lo, p.s_guard_hi);
  }
  const double I = eq.I0 + x.dI;
  const double U = eq.U0 + u;
  Eigen::Vector3d dx;
  dx[0] = x.sdot;
  dx[1] = p.g + (F_hat_load - model.force(s, I)) / p.m;
  dx[2] = model.alpha(s, x.sdot, I) * I + model.beta(s, I) * U;
  return dx;
}

Eigen::Vector3d synth_output(const SynthState& x, double F_hat_load, const Equilibrium& eq, const PlantParams& p,
                             const MagnetModel& model) {
  const double s = eq.s0 + x.ds;
  if (s < p.s_guard_lo || s > p.s_guard_hi) {
    throw BoundsError("synthesis air gap left validity window", s, p.s_guard_lo, p.s_guard_hi);
  }
  const double I = eq.I0 + x.dI;
  Eigen::Vector3d y;
  y[0] = s;
  y[1] = p.g + (F_hat_load - model.force(s, I)) / p.m;
  y[2] = I;
  return y;
}

LoadEstimator LoadEstimator::updated(double s_meas, double s0, double delta) const {
  LoadEstimator next = *this;
  next.accumulator += (s_meas - s0) * delta;
  if (clamp_abs > 0.0 && k_s > 0.0) {
    const double acc_bound = clamp_abs / k_s;
    next.accumulator = std::clamp(next.accumulator, -acc_bound, acc_bound);
  }
  next.d_hat = next.k_s * next.accumulator;
  return next;
}

LoadEstimator make_load_estimator(const PlantParams& p, double k_s) {
  LoadEstimator est;
  est.k_s = k_s;
  est.clamp_abs = 0.5 * p.m * p.g;
  return est;
}

void ScalingConfig::validate() const {
  if (!(x_scale.minCoeff() > 0) || !(u_scale > 0) || !(y_scale.minCoeff() > 0)) {
    throw ConfigError("scaling factors must be strictly positive");
  }
}

}  // namespace maglev
