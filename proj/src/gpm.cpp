#include "maglev/gpm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "maglev/lqr.hpp"

namespace maglev {

void GpmSettings::validate() const {
  if (max_iter < 1) throw ConfigError("gpm.max_iter must be >= 1");
  if (!(gamma0 > 0)) throw ConfigError("gpm.gamma0 must be > 0");
  if (!(tol_pg > 0) || !(tol_rel_cost > 0)) throw ConfigError("gpm tolerances must be > 0");
  if (grid_M != 0 && grid_M < 10) throw ConfigError("gpm.grid_M must be >= 10 (or 0 for the default)");
}

GpmSolver::GpmSolver(std::shared_ptr<OcpProblem> ocp, GpmSettings settings)
    : ocp_(std::move(ocp)), settings_(settings) {
  settings_.validate();
}

int GpmSolver::grid_cells() const {
  return settings_.grid_M > 0 ? settings_.grid_M : ocp_->config().N * ocp_->config().rk_substeps;
}

std::vector<Eigen::Vector3d> GpmSolver::forward_integrate(const Eigen::Vector3d& x_hat,
                                                          const std::vector<double>& u) const {
  const int M = grid_cells();
  const double h = cell_width();
  std::vector<Eigen::Vector3d> x(M + 1);
  x[0] = x_hat;
  for (int i = 0; i < M; ++i) x[i + 1] = rk4_step_sens(*ocp_, x[i], u[i], h).x_next;
  return x;
}

std::vector<Eigen::Vector3d> GpmSolver::backward_costate(const std::vector<Eigen::Vector3d>& x,
                                                         const std::vector<double>& u) const {
  const int M = grid_cells();
  const double h = cell_width();
  std::vector<Eigen::Vector3d> lambda(M + 1);
  lambda[M].setZero();  // no terminal cost
  for (int i = M - 1; i >= 0; --i) {
    const StepSens s = rk4_step_sens(*ocp_, x[i], u[i], h);
    const auto [dl_dx, dl_du] = ocp_->cost_gradients(x[i], u[i]);
    lambda[i] = h * dl_dx + s.A.transpose() * lambda[i + 1];
  }
  return lambda;
}

std::vector<double> GpmSolver::control_gradient(const std::vector<Eigen::Vector3d>& x,
                                                const std::vector<Eigen::Vector3d>& lambda,
                                                const std::vector<double>& u) const {
  const int M = grid_cells();
  const double h = cell_width();
  std::vector<double> grad(M);
  for (int i = 0; i < M; ++i) {
    const StepSens s = rk4_step_sens(*ocp_, x[i], u[i], h);
    const auto [dl_dx, dl_du] = ocp_->cost_gradients(x[i], u[i]);
    (void)dl_dx;
    grad[i] = dl_du + s.B.dot(lambda[i + 1]) / h;
  }
  return grad;
}

double GpmSolver::cost(const std::vector<Eigen::Vector3d>& x, const std::vector<double>& u) const {
  const int M = grid_cells();
  const double h = cell_width();
  double J = 0.0;
  for (int i = 0; i < M; ++i) J += h * ocp_->stage_cost_xu(x[i], u[i]);
  return J;
}

std::vector<double> GpmSolver::shift(const std::vector<double>& u, double delta) const {
  const int M = grid_cells();
  const double h = cell_width();
  const int cells = std::max(1, static_cast<int>(std::lround(delta / h)));
  std::vector<double> out(M);
  for (int i = 0; i < M; ++i) out[i] = u[std::min(i + cells, M - 1)];
  return out;
}

const Eigen::RowVector3d& GpmSolver::cold_start_gain() const {
  if (!cold_gain_) {
    try {
      cold_gain_ = LqrBaseline(*ocp_, ocp_->config().delta_N()).gain().K;
    } catch (const std::exception&) {
      cold_gain_ = Eigen::RowVector3d::Zero();
    }
  }
  return *cold_gain_;
}

SolveResult GpmSolver::gpm_solve(const Eigen::Vector3d& x_hat, const std::vector<double>* warm) {
  const auto t0 = std::chrono::steady_clock::now();
  const int M = grid_cells();
  SolveResult res;

  std::vector<double> u(M, 0.0);
  if (warm && static_cast<int>(warm->size()) == M) {
    u = *warm;
  } else {
    // Cold start: keep the zero trajectory when it stays inside the validity
    // window; otherwise roll out under the saturated linear feedback law so
    // the initial trajectory is integrable, holding the last input if the
    // rollout escapes anyway.
    const double h = cell_width();
    bool ok = true;
    Eigen::Vector3d xr = x_hat;
    for (int i = 0; i < M && ok; ++i) {
      try {
        xr = rk4_step_sens(*ocp_, xr, 0.0, h).x_next;
      } catch (const BoundsError&) {
        ok = false;
      }
    }
    if (!ok) {
      const Eigen::RowVector3d& K = cold_start_gain();
      xr = x_hat;
      for (int i = 0; i < M; ++i) {
        u[i] = ocp_->project_input(-(K * xr)(0));
        try {
          xr = rk4_step_sens(*ocp_, xr, u[i], h).x_next;
        } catch (const BoundsError&) {
          for (int j = i + 1; j < M; ++j) u[j] = u[i];
          break;
        }
      }
    }
  }
  for (double& ui : u) ui = ocp_->project_input(ui);

  std::vector<Eigen::Vector3d> x;
  double J;
  try {
    x = forward_integrate(x_hat, u);
    J = cost(x, u);
  } catch (const BoundsError& e) {
    res.status = SolveStatus::domain_error;
    res.message = std::string("forward integration diverged: ") + e.what();
    res.u = u;
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }

  double gamma = settings_.gamma0;
  res.status = SolveStatus::max_iter;
  res.message = "iteration budget exhausted";

  for (int iter = 1; iter <= settings_.max_iter; ++iter) {
    res.iterations = iter;
    const auto lambda = backward_costate(x, u);
    bool finite = true;
    for (const auto& l : lambda)
      if (!l.allFinite()) finite = false;
    if (!finite) {
      res.status = SolveStatus::max_iter;
      res.message = "costate blow-up (non-finite adjoint)";
      break;
    }
    const auto grad = control_gradient(x, lambda, u);

    double pg = 0.0;
    for (int i = 0; i < M; ++i) {
      const double proj = ocp_->project_input(u[i] - grad[i]);
      pg = std::max(pg, std::abs(u[i] - proj));
    }
    res.kkt_residual = pg;
    if (pg < settings_.tol_pg) {
      res.status = SolveStatus::converged;
      res.message.clear();
      break;
    }

    // Adaptive step rule: probe a small bracket around the current step size
    // and keep the best cost.
    const double candidates[4] = {2.0 * gamma, gamma, 0.5 * gamma, 0.25 * gamma};
    double best_J = std::numeric_limits<double>::infinity();
    double best_gamma = 0.0;
    std::vector<double> best_u;
    std::vector<Eigen::Vector3d> best_x;
    for (double gc : candidates) {
      std::vector<double> uc(M);
      for (int i = 0; i < M; ++i) uc[i] = ocp_->project_input(u[i] - gc * grad[i]);
      try {
        auto xc = forward_integrate(x_hat, uc);
        const double Jc = cost(xc, uc);
        if (Jc < best_J) {
          best_J = Jc;
          best_gamma = gc;
          best_u = std::move(uc);
          best_x = std::move(xc);
        }
      } catch (const BoundsError&) {
        // Candidate trajectory left the validity window; discard it.
      }
    }

    if (best_gamma == 0.0 || best_J > J + 1e-12) {
      // None of the probed steps decreases the cost; shrink further before
      // declaring a stall.
      bool recovered = false;
      double gc = 0.125 * gamma;
      for (int shrink = 0; shrink < 40 && gc > 1e-16; ++shrink, gc *= 0.5) {
        std::vector<double> uc(M);
        for (int i = 0; i < M; ++i) uc[i] = ocp_->project_input(u[i] - gc * grad[i]);
        try {
          auto xc = forward_integrate(x_hat, uc);
          const double Jc = cost(xc, uc);
          if (Jc <= J + 1e-12) {
            best_J = Jc;
            best_gamma = gc;
            best_u = std::move(uc);
            best_x = std::move(xc);
            recovered = true;
            break;
          }
        } catch (const BoundsError&) {
        }
      }
      if (!recovered) {
        res.status = SolveStatus::max_iter;
        res.message = "line-search stall (no descent step found)";
        break;
      }
    }

    const double rel_decrease = (J - best_J) / std::max(std::abs(J), 1e-300);
    u = std::move(best_u);
    x = std::move(best_x);
    J = best_J;
    gamma = best_gamma;
    if (rel_decrease >= 0.0 && rel_decrease < settings_.tol_rel_cost) {
      res.status = SolveStatus::converged;
      res.message.clear();
      break;
    }
  }

  res.u = u;
  res.x = x;
  res.objective = J;
  prev_u_ = u;
  has_prev_ = true;
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace maglev
