#include "maglev/ocp.hpp"

#include <algorithm>

#include "maglev/rk4.hpp"

namespace maglev {

void OcpConfig::validate() const {
  if (!(T > 0)) throw ConfigError("ocp.T must be > 0");
  if (N < 1) throw ConfigError("ocp.N must be >= 1");
  if (Q.minCoeff() < 0) throw ConfigError("ocp.Q must be entrywise nonnegative");
  if (!(R > 0)) throw ConfigError("ocp.R must be > 0");
  if (rk_substeps < 1) throw ConfigError("ocp.rk_substeps must be >= 1");
  scaling.validate();
}

OcpProblem::OcpProblem(OcpConfig cfg, PlantParams params, std::shared_ptr<const MagnetModel> model, Equilibrium eq)
    : cfg_(std::move(cfg)), params_(params), model_(std::move(model)), eq_(eq), F_hat_(params.F_load0) {
  cfg_.validate();
  params_.validate();
  u_lo_ = cfg_.scaling.scale_input(params_.u_min - eq_.U0);
  u_hi_ = cfg_.scaling.scale_input(params_.u_max - eq_.U0);
  if (!(u_lo_ < u_hi_)) throw ConfigError("scaled input bounds collapsed");
}

Eigen::Vector3d OcpProblem::deriv(const Eigen::Vector3d& x, double u) const {
  const SynthState xs = SynthState::from_vec(cfg_.scaling.unscale_state(x));
  const double du = cfg_.scaling.unscale_input(u);
  return synth_deriv(xs, du, F_hat_, eq_, params_, *model_).cwiseQuotient(cfg_.scaling.x_scale);
}

Eigen::Vector3d OcpProblem::output(const Eigen::Vector3d& x) const {
  const SynthState xs = SynthState::from_vec(cfg_.scaling.unscale_state(x));
  Eigen::Vector3d y = synth_output(xs, F_hat_, eq_, params_, *model_);
  // Deviation from the reference output (s0, 0, I0), then scaled.
  y[0] -= eq_.s0;
  y[2] -= eq_.I0;
  return cfg_.scaling.scale_output(y);
}

Eigen::Matrix3d OcpProblem::output_jacobian(const Eigen::Vector3d& x) const {
  Eigen::Matrix3d C;
  if (model_->has_analytic_derivatives()) {
    const Eigen::Vector3d xp = cfg_.scaling.unscale_state(x);
    const double s = eq_.s0 + xp[0];
    const double I = eq_.I0 + xp[2];
    C.setZero();
    C(0, 0) = 1.0;
    C(1, 0) = -model_->force_ds(s, I) / params_.m;
    C(1, 2) = -model_->force_dI(s, I) / params_.m;
    C(2, 2) = 1.0;
  } else {
    // Central finite differences on the scaled deviation output (D8).
    const double h = 1e-6;
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      C.col(j) = (output(xp) - output(xm)) / (2 * h);
    }
    return C;
  }
  // Scale: C_s(i,j) = C(i,j) * x_scale(j) / y_scale(i).
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) C(i, j) *= cfg_.scaling.x_scale[j] / cfg_.scaling.y_scale[i];
  return C;
}

double OcpProblem::stage_cost(const Eigen::Vector3d& y, double u) const {
  return y.dot(cfg_.Q.cwiseProduct(y)) + cfg_.R * u * u;
}

double OcpProblem::stage_cost_xu(const Eigen::Vector3d& x, double u) const { return stage_cost(output(x), u); }

std::pair<Eigen::Vector3d, double> OcpProblem::cost_gradients(const Eigen::Vector3d& x, double u) const {
  const Eigen::Vector3d y = output(x);
  const Eigen::Matrix3d C = output_jacobian(x);
  const Eigen::Vector3d dl_dx = C.transpose() * (2.0 * cfg_.Q.cwiseProduct(y));
  return {dl_dx, 2.0 * cfg_.R * u};
}

std::pair<Eigen::Matrix3d, Eigen::Vector3d> OcpProblem::dynamics_jacobians(const Eigen::Vector3d& x, double u) const {
  Eigen::Matrix3d A;
  Eigen::Vector3d B;
  if (model_->has_analytic_derivatives()) {
    const Eigen::Vector3d xp = cfg_.scaling.unscale_state(x);
    const double s = eq_.s0 + xp[0];
    const double sdot = xp[1];
    const double I = eq_.I0 + xp[2];
    const double U = eq_.U0 + cfg_.scaling.unscale_input(u);
    const MagnetModel& m = *model_;
    A.setZero();
    A(0, 1) = 1.0;
    A(1, 0) = -m.force_ds(s, I) / params_.m;
    A(1, 2) = -m.force_dI(s, I) / params_.m;
    A(2, 0) = m.alpha_ds(s, sdot, I) * I + m.beta_ds(s, I) * U;
    A(2, 1) = m.alpha_dsdot(s, sdot, I) * I;
    A(2, 2) = m.alpha(s, sdot, I) + m.alpha_dI(s, sdot, I) * I + m.beta_dI(s, I) * U;
    B << 0.0, 0.0, m.beta(s, I);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) A(i, j) *= cfg_.scaling.x_scale[j] / cfg_.scaling.x_scale[i];
      B[i] *= cfg_.scaling.u_scale / cfg_.scaling.x_scale[i];
    }
  } else {
    const double h = 1e-6;
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      A.col(j) = (deriv(xp, u) - deriv(xm, u)) / (2 * h);
    }
    B = (deriv(x, u + h) - deriv(x, u - h)) / (2 * h);
  }
  return {A, B};
}

StageDerivatives OcpProblem::stage_derivatives(const Eigen::Vector3d& x, double u) const {
  StageDerivatives d;
  std::tie(d.A, d.B) = dynamics_jacobians(x, u);
  d.C_y = output_jacobian(x);
  std::tie(d.dl_dx, d.dl_du) = cost_gradients(x, u);
  return d;
}

double OcpProblem::project_input(double u) const { return std::clamp(u, u_lo_, u_hi_); }

StepSens rk4_step_sens(const OcpProblem& ocp, const Eigen::Vector3d& x, double u, double h) {
  using Eigen::Matrix3d;
  using Eigen::Vector3d;

  // Stage values and their derivatives w.r.t. (x, u), chained through the
  // Runge-Kutta stages.
  const Vector3d k1 = ocp.deriv(x, u);
  const auto [A1, B1] = ocp.dynamics_jacobians(x, u);
  const Matrix3d K1x = A1;
  const Vector3d K1u = B1;

  const Vector3d x2 = x + (h / 2) * k1;
  const Vector3d k2 = ocp.deriv(x2, u);
  const auto [A2, B2] = ocp.dynamics_jacobians(x2, u);
  const Matrix3d K2x = A2 * (Matrix3d::Identity() + (h / 2) * K1x);
  const Vector3d K2u = A2 * ((h / 2) * K1u) + B2;

  const Vector3d x3 = x + (h / 2) * k2;
  const Vector3d k3 = ocp.deriv(x3, u);
  const auto [A3, B3] = ocp.dynamics_jacobians(x3, u);
  const Matrix3d K3x = A3 * (Matrix3d::Identity() + (h / 2) * K2x);
  const Vector3d K3u = A3 * ((h / 2) * K2u) + B3;

  const Vector3d x4 = x + h * k3;
  const Vector3d k4 = ocp.deriv(x4, u);
  const auto [A4, B4] = ocp.dynamics_jacobians(x4, u);
  const Matrix3d K4x = A4 * (Matrix3d::Identity() + h * K3x);
  const Vector3d K4u = A4 * (h * K3u) + B4;

  StepSens out;
  out.x_next = x + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
  out.A = Matrix3d::Identity() + (h / 6) * (K1x + 2 * K2x + 2 * K3x + K4x);
  out.B = (h / 6) * (K1u + 2 * K2u + 2 * K3u + K4u);
  return out;
}

}  // namespace maglev
