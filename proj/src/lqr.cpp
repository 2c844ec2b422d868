#include "maglev/lqr.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace maglev {

Eigen::MatrixXd expm(const Eigen::MatrixXd& M) {
  const double norm = M.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  const Eigen::MatrixXd A = M * scale;
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(M.rows(), M.cols());
  Eigen::MatrixXd term = result;
  // With ||A|| <= 1/2 the series truncation error at 20 terms is far below
  // 1e-12.
  for (int k = 1; k <= 20; ++k) {
    term = term * A / static_cast<double>(k);
    result += term;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

LinearModel linearize_origin(const OcpProblem& ocp, double delta) {
  const Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  const auto [A, B] = ocp.dynamics_jacobians(origin, 0.0);

  // ZOH discretization: exp([[A, B], [0, 0]] * delta) = [[A_d, B_d], [0, I]].
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(4, 4);
  aug.topLeftCorner<3, 3>() = A;
  aug.topRightCorner<3, 1>() = B;
  const Eigen::MatrixXd E = expm(aug * delta);

  LinearModel m;
  m.A_d = E.topLeftCorner<3, 3>();
  m.B_d = E.topRightCorner<3, 1>();
  m.C_y = ocp.output_jacobian(origin);
  m.delta = delta;
  return m;
}

double dare_residual(const LinearModel& model, const Eigen::Matrix3d& Q_x, double R, const Eigen::Matrix3d& P) {
  const Eigen::Matrix3d& A = model.A_d;
  const Eigen::Vector3d& B = model.B_d;
  const double denom = R + (B.transpose() * P * B)(0);
  const Eigen::Matrix3d next = A.transpose() * P * A -
                               (A.transpose() * P * B) * (B.transpose() * P * A) / denom + Q_x;
  return (P - next).cwiseAbs().maxCoeff();
}

LqrGain solve_dare(const LinearModel& model, const Eigen::Matrix3d& Q_x, double R) {
  const Eigen::Matrix3d& A = model.A_d;
  const Eigen::Vector3d& B = model.B_d;
  Eigen::Matrix3d P = Q_x;
  const int max_iter = 100000;
  bool converged = false;
  for (int i = 0; i < max_iter; ++i) {
    const double denom = R + (B.transpose() * P * B)(0);
    const Eigen::Matrix3d next = A.transpose() * P * A -
                                 (A.transpose() * P * B) * (B.transpose() * P * A) / denom + Q_x;
    const double diff = (next - P).cwiseAbs().maxCoeff();
    P = 0.5 * (next + next.transpose());
    if (diff < 1e-10) {
      converged = true;
      break;
    }
    if (!P.allFinite()) break;
  }
  if (!converged) throw UnstabilizableModelError("DARE fixed-point iteration did not converge");

  LqrGain gain;
  gain.P = P;
  const double denom = R + (B.transpose() * P * B)(0);
  gain.K = (B.transpose() * P * A) / denom;
  if (spectral_radius(A - B * gain.K) >= 1.0)
    throw UnstabilizableModelError("DARE produced a non-stabilizing gain");
  return gain;
}

double spectral_radius(const Eigen::Matrix3d& M) {
  return M.eigenvalues().cwiseAbs().maxCoeff();
}

LqrBaseline::LqrBaseline(const OcpProblem& ocp, double delta) : model_(linearize_origin(ocp, delta)) {
  const Eigen::Matrix3d Q_x =
      model_.C_y.transpose() * ocp.config().Q.asDiagonal() * model_.C_y;
  gain_ = solve_dare(model_, Q_x, ocp.config().R);
}

}  // namespace maglev
