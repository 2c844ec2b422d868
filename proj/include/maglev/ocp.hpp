#pragma once

#include <Eigen/Core>
#include <memory>
#include <utility>

#include "maglev/synthesis.hpp"

namespace maglev {

/// Declarative optimal control problem configuration.  All weights act on
/// scaled quantities.
struct OcpConfig {
  double T = 0.05;                   ///< prediction horizon [s]
  int N = 25;                        ///< shooting / discretization intervals
  Eigen::Vector3d Q{75.0, 15.0, 5.0};  ///< output weights (Q_s, Q_zdd, Q_I)
  double R = 1.0;                    ///< input weight
  int rk_substeps = 2;               ///< RK4 substeps per interval
  ScalingConfig scaling;

  void validate() const;
  double delta_N() const { return T / N; }
};

/// Per-point derivative information of the scaled problem.
struct StageDerivatives {
  Eigen::Matrix3d A;      ///< d f / d x
  Eigen::Vector3d B;      ///< d f / d u
  Eigen::Matrix3d C_y;    ///< d y / d x
  Eigen::Vector3d dl_dx;  ///< stage-cost gradient w.r.t. state
  double dl_du = 0.0;     ///< stage-cost gradient w.r.t. input
};

/// The OCP of the levitation controller expressed entirely in scaled
/// variables: state x = S_x^-1 [ds, sdot, dI], input u = S_u^-1 dU, deviation
/// output y = S_y^-1 [ds, zdd, dI].  The stage cost is y^T Q y + R u^2.
///
/// Immutable except for the per-sampling-step load estimate; each controller
/// owns its instance.
class OcpProblem {
 public:
  OcpProblem(OcpConfig cfg, PlantParams params, std::shared_ptr<const MagnetModel> model, Equilibrium eq);

  Eigen::Vector3d deriv(const Eigen::Vector3d& x, double u) const;
  Eigen::Vector3d output(const Eigen::Vector3d& x) const;
  Eigen::Matrix3d output_jacobian(const Eigen::Vector3d& x) const;

  double stage_cost(const Eigen::Vector3d& y, double u) const;
  double stage_cost_xu(const Eigen::Vector3d& x, double u) const;
  std::pair<Eigen::Vector3d, double> cost_gradients(const Eigen::Vector3d& x, double u) const;
  std::pair<Eigen::Matrix3d, Eigen::Vector3d> dynamics_jacobians(const Eigen::Vector3d& x, double u) const;
  StageDerivatives stage_derivatives(const Eigen::Vector3d& x, double u) const;

  /// Clamps a scaled input to the admissible box.
  double project_input(double u) const;
  double u_lower() const { return u_lo_; }
  double u_upper() const { return u_hi_; }

  void set_load_estimate(double F_hat) { F_hat_ = F_hat; }
  double load_estimate() const { return F_hat_; }

  const OcpConfig& config() const { return cfg_; }
  const PlantParams& params() const { return params_; }
  const MagnetModel& model() const { return *model_; }
  const Equilibrium& eq() const { return eq_; }

 private:
  OcpConfig cfg_;
  PlantParams params_;
  std::shared_ptr<const MagnetModel> model_;
  Equilibrium eq_;
  double F_hat_;
  double u_lo_, u_hi_;
};

/// One RK4 step of the scaled dynamics together with the exact sensitivities
/// of the discrete map, propagated through the stages.
struct StepSens {
  Eigen::Vector3d x_next;
  Eigen::Matrix3d A;  ///< d x_next / d x
  Eigen::Vector3d B;  ///< d x_next / d u
};

StepSens rk4_step_sens(const OcpProblem& ocp, const Eigen::Vector3d& x, double u, double h);

}  // namespace maglev
