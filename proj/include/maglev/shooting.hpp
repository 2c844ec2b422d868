#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "maglev/ocp.hpp"

namespace maglev {

enum class SolveStatus { converged, max_iter, qp_failure, domain_error };

std::string to_string(SolveStatus s);

/// Common result type of both solver families.  Controls and states are in
/// scaled coordinates.
struct SolveResult {
  std::vector<double> u;
  std::vector<Eigen::Vector3d> x;
  double objective = 0.0;
  double kkt_residual = 0.0;
  double max_defect = 0.0;
  int iterations = 0;
  double wall_time = 0.0;  ///< [s]
  SolveStatus status = SolveStatus::max_iter;
  std::string message;
};

/// Multiple-shooting iterate: node states x_0..x_N and controls u_0..u_{N-1}.
struct ShootingIterate {
  std::vector<Eigen::Vector3d> x;
  std::vector<double> u;
};

/// Linearization of one RK4 interval map around the current iterate.
struct IntervalSensitivity {
  Eigen::Vector3d x_end;  ///< F(x_k, u_k)
  Eigen::Matrix3d A;      ///< dF/dx
  Eigen::Vector3d B;      ///< dF/du
};

/// Dense input-space QP obtained by eliminating the node states.
struct CondensedQp {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::VectorXd lb, ub;
};

struct BoxQpResult {
  Eigen::VectorXd u;
  std::vector<int> active;  ///< -1 lower, +1 upper, 0 free
  SolveStatus status = SolveStatus::converged;
  double kkt_residual = 0.0;
  int pivots = 0;
};

/// Primal active-set solver for min 1/2 u'Hu + g'u, lb <= u <= ub with H
/// positive definite.  Deterministic lowest-index pivot order; cycling guard
/// at 10 n pivots.
BoxQpResult solve_box_qp(const CondensedQp& qp);

struct SqpSettings {
  int max_iter = 50;
  double tol_kkt = 1e-6;
  double tol_defect = 1e-8;
  double merit_penalty = 1e4;
  int max_linesearch = 8;
  double full_step_defect = 1e-6;  ///< accept full steps below this defect level
};

/// Direct solver: Gauss-Newton SQP on the multiple-shooting transcription,
/// condensed to a dense box-constrained QP.  A solver instance owns a mutable
/// warm-start workspace; instances are independent.
class ShootingSolver {
 public:
  explicit ShootingSolver(std::shared_ptr<OcpProblem> ocp, SqpSettings settings = {});

  ShootingIterate transcribe(const Eigen::Vector3d& x_hat, const ShootingIterate* warm = nullptr) const;
  std::vector<IntervalSensitivity> linearize(const ShootingIterate& it) const;
  CondensedQp condense(const ShootingIterate& it, const std::vector<IntervalSensitivity>& sens) const;

  /// Full SQP to convergence.
  SolveResult sqp_solve(const Eigen::Vector3d& x_hat, const ShootingIterate* warm = nullptr);

  /// One real-time iteration: a single linearize-condense-QP cycle with the
  /// stored previous solution shifted by one interval as warm start.
  SolveResult rti_step(const Eigen::Vector3d& x_hat);

  /// Shifts an iterate by one interval (u_k <- u_{k+1}, last repeated).
  ShootingIterate shift(const ShootingIterate& it) const;

  void reset() { has_prev_ = false; }
  OcpProblem& ocp() { return *ocp_; }
  const OcpProblem& ocp() const { return *ocp_; }
  const SqpSettings& settings() const { return settings_; }

  Eigen::Vector3d interval_map(const Eigen::Vector3d& x, double u) const;
  IntervalSensitivity interval_map_with_sens(const Eigen::Vector3d& x, double u) const;

 private:
  double objective(const ShootingIterate& it) const;
  double max_defect(const ShootingIterate& it) const;
  const Eigen::RowVector3d& cold_start_gain() const;

  std::shared_ptr<OcpProblem> ocp_;
  SqpSettings settings_;
  mutable std::optional<Eigen::RowVector3d> cold_gain_;
  ShootingIterate prev_;
  bool has_prev_ = false;
};

}  // namespace maglev
