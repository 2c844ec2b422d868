#pragma once

#include <Eigen/Core>

#include "maglev/plant.hpp"

namespace maglev {

/// Equilibrium of the levitated mass at the nominal gap.
struct Equilibrium {
  double s0 = 0.0;  ///< nominal air gap [m]
  double I0 = 0.0;  ///< equilibrium current [A]
  double U0 = 0.0;  ///< equilibrium voltage [V]
};

Equilibrium find_equilibrium(const PlantParams& p, const MagnetModel& model, double s0);

/// Control-model state in shifted coordinates; the origin is the equilibrium.
struct SynthState {
  double ds = 0.0;    ///< gap deviation [m]
  double sdot = 0.0;  ///< gap rate [m/s]
  double dI = 0.0;    ///< current deviation [A]

  Eigen::Vector3d vec() const { return {ds, sdot, dI}; }
  static SynthState from_vec(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

/// Shifted-coordinate dynamics (guideway deflection assumed zero).
/// u is the voltage deviation dU; F_hat_load the current load-force estimate.
Eigen::Vector3d synth_deriv(const SynthState& x, double u, double F_hat_load, const Equilibrium& eq,
                            const PlantParams& p, const MagnetModel& model);

/// Outputs (s, zdd, I) of the control model in original units.
Eigen::Vector3d synth_output(const SynthState& x, double F_hat_load, const Equilibrium& eq, const PlantParams& p,
                             const MagnetModel& model);

/// Integral estimator of the slow load-force disturbance:
///   d_hat = k_s * integral of (s - s0).
/// The accumulator is clamped so |d_hat| never exceeds clamp_abs (anti-windup).
struct LoadEstimator {
  double k_s = 2e4;        ///< estimator gain [N/(m s)]
  double clamp_abs = 0.0;  ///< |d_hat| bound [N]; 0 disables the clamp
  double accumulator = 0.0;
  double d_hat = 0.0;

  LoadEstimator updated(double s_meas, double s0, double delta) const;
};

LoadEstimator make_load_estimator(const PlantParams& p, double k_s);

/// Diagonal linear scaling bringing OCP states, inputs, and outputs to
/// order one.
struct ScalingConfig {
  Eigen::Vector3d x_scale{1e-2, 1e-1, 10.0};
  double u_scale = 100.0;
  Eigen::Vector3d y_scale{1e-2, 9.81, 10.0};

  void validate() const;

  Eigen::Vector3d scale_state(const Eigen::Vector3d& x) const { return x.cwiseQuotient(x_scale); }
  Eigen::Vector3d unscale_state(const Eigen::Vector3d& x) const { return x.cwiseProduct(x_scale); }
  double scale_input(double u) const { return u / u_scale; }
  double unscale_input(double u) const { return u * u_scale; }
  Eigen::Vector3d scale_output(const Eigen::Vector3d& y) const { return y.cwiseQuotient(y_scale); }
  Eigen::Vector3d unscale_output(const Eigen::Vector3d& y) const { return y.cwiseProduct(y_scale); }
};

}  // namespace maglev
