#pragma once

#include <Eigen/Core>

#include "maglev/ocp.hpp"

namespace maglev {

/// Discrete-time linearization of the scaled synthesis model at the origin.
struct LinearModel {
  Eigen::Matrix3d A_d;
  Eigen::Vector3d B_d;
  Eigen::Matrix3d C_y;  ///< scaled output map at the origin
  double delta = 0.0;   ///< sampling period [s]
};

struct LqrGain {
  Eigen::RowVector3d K;
  Eigen::Matrix3d P;
};

/// Matrix exponential by scaling-and-squaring of the truncated Taylor series.
Eigen::MatrixXd expm(const Eigen::MatrixXd& M);

/// Continuous Jacobians at the origin, discretized exactly (ZOH) via the
/// augmented matrix exponential.
LinearModel linearize_origin(const OcpProblem& ocp, double delta);

/// Fixed-point iteration on the discrete algebraic Riccati equation.
/// Throws UnstabilizableModelError when the iteration does not settle.
LqrGain solve_dare(const LinearModel& model, const Eigen::Matrix3d& Q_x, double R);

/// DARE residual ||P - (A'PA - A'PB (R + B'PB)^-1 B'PA + Q_x)||_inf.
double dare_residual(const LinearModel& model, const Eigen::Matrix3d& Q_x, double R, const Eigen::Matrix3d& P);

/// Largest eigenvalue magnitude (used for the open/closed-loop checks).
double spectral_radius(const Eigen::Matrix3d& M);

/// Saturated linear state feedback baseline.  The raw control is linear in
/// the state; saturation is applied by the simulator's actuator.
class LqrBaseline {
 public:
  /// Weights mirror the MPC output cost: Q_x = C_y' Q C_y.
  LqrBaseline(const OcpProblem& ocp, double delta);

  /// Scaled control from a scaled state (pre-saturation).
  double control(const Eigen::Vector3d& x_scaled) const { return -(gain_.K * x_scaled)(0); }

  const LinearModel& model() const { return model_; }
  const LqrGain& gain() const { return gain_; }

 private:
  LinearModel model_;
  LqrGain gain_;
};

}  // namespace maglev
