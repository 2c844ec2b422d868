#pragma once

#include <memory>
#include <vector>

#include "maglev/shooting.hpp"

namespace maglev {

struct GpmSettings {
  int max_iter = 200;           ///< gradient iterations per solve
  double gamma0 = 0.1;          ///< initial step size in scaled units
  double tol_pg = 1e-8;         ///< projected-gradient convergence tolerance
  double tol_rel_cost = 1e-12;  ///< relative cost-decrease tolerance
  int grid_M = 0;               ///< integration grid cells; 0 = N * rk_substeps

  void validate() const;
};

/// Indirect solver: projected gradient descent on the control trajectory
/// with forward state integration and backward costate recursion.  The
/// costate recursion is the exact adjoint of the discretized cost, built
/// from the transposed RK4 step sensitivities, so the control gradient is
/// exact for the discrete problem.
class GpmSolver {
 public:
  GpmSolver(std::shared_ptr<OcpProblem> ocp, GpmSettings settings = {});

  int grid_cells() const;
  double cell_width() const { return ocp_->config().T / grid_cells(); }

  std::vector<Eigen::Vector3d> forward_integrate(const Eigen::Vector3d& x_hat, const std::vector<double>& u) const;

  /// Costates lambda_0..lambda_M with the terminal condition lambda_M = 0.
  std::vector<Eigen::Vector3d> backward_costate(const std::vector<Eigen::Vector3d>& x,
                                                const std::vector<double>& u) const;

  /// Hamiltonian gradient w.r.t. each control cell (cost-rate units).
  std::vector<double> control_gradient(const std::vector<Eigen::Vector3d>& x,
                                       const std::vector<Eigen::Vector3d>& lambda,
                                       const std::vector<double>& u) const;

  double cost(const std::vector<Eigen::Vector3d>& x, const std::vector<double>& u) const;

  SolveResult gpm_solve(const Eigen::Vector3d& x_hat, const std::vector<double>* warm = nullptr);

  /// Warm start shifted by one sampling period of width delta.
  std::vector<double> shift(const std::vector<double>& u, double delta) const;

  void reset() { has_prev_ = false; }
  const std::vector<double>& previous_controls() const { return prev_u_; }
  bool has_previous() const { return has_prev_; }
  OcpProblem& ocp() { return *ocp_; }
  const GpmSettings& settings() const { return settings_; }

 private:
  const Eigen::RowVector3d& cold_start_gain() const;

  std::shared_ptr<OcpProblem> ocp_;
  GpmSettings settings_;
  mutable std::optional<Eigen::RowVector3d> cold_gain_;
  std::vector<double> prev_u_;
  bool has_prev_ = false;
};

}  // namespace maglev
