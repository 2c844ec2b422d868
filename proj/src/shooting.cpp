#include "maglev/shooting.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <chrono>
#include <cmath>

#include "maglev/lqr.hpp"

namespace maglev {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max-iter";
    case SolveStatus::qp_failure: return "qp-failure";
    case SolveStatus::domain_error: return "domain-error";
  }
  return "unknown";
}

BoxQpResult solve_box_qp(const CondensedQp& qp) {
  const int n = static_cast<int>(qp.g.size());
  BoxQpResult res;
  res.u = Eigen::VectorXd::Zero(n);
  res.active.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    res.u[i] = std::clamp(0.0, qp.lb[i], qp.ub[i]);
    if (res.u[i] <= qp.lb[i]) res.active[i] = -1;
    else if (res.u[i] >= qp.ub[i]) res.active[i] = 1;
  }

  const int max_pivots = 10 * std::max(n, 1);
  const double tol = 1e-12;
  while (true) {
    if (res.pivots > max_pivots) {
      res.status = SolveStatus::qp_failure;
      return res;
    }
    std::vector<int> free_idx;
    for (int i = 0; i < n; ++i)
      if (res.active[i] == 0) free_idx.push_back(i);
    const int nf = static_cast<int>(free_idx.size());

    Eigen::VectorXd grad = qp.H * res.u + qp.g;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    if (nf > 0) {
      Eigen::MatrixXd Hff(nf, nf);
      Eigen::VectorXd gf(nf);
      for (int a = 0; a < nf; ++a) {
        gf[a] = grad[free_idx[a]];
        for (int b = 0; b < nf; ++b) Hff(a, b) = qp.H(free_idx[a], free_idx[b]);
      }
      Eigen::LLT<Eigen::MatrixXd> llt(Hff);
      if (llt.info() != Eigen::Success) {
        res.status = SolveStatus::qp_failure;
        return res;
      }
      const Eigen::VectorXd pf = llt.solve(-gf);
      for (int a = 0; a < nf; ++a) p[free_idx[a]] = pf[a];
    }

    if (p.lpNorm<Eigen::Infinity>() < tol) {
      // Subspace minimum; release the lowest-index bound with a wrong-signed
      // multiplier, or stop.
      int release = -1;
      for (int i = 0; i < n; ++i) {
        if (res.active[i] == -1 && grad[i] < -tol) { release = i; break; }
        if (res.active[i] == 1 && grad[i] > tol) { release = i; break; }
      }
      if (release < 0) {
        double kkt = 0.0;
        for (int i = 0; i < n; ++i) {
          if (res.active[i] == 0) kkt = std::max(kkt, std::abs(grad[i]));
          else if (res.active[i] == -1) kkt = std::max(kkt, std::max(0.0, -grad[i]));
          else kkt = std::max(kkt, std::max(0.0, grad[i]));
        }
        res.kkt_residual = kkt;
        res.status = SolveStatus::converged;
        return res;
      }
      res.active[release] = 0;
      ++res.pivots;
      continue;
    }

    // Step to the nearest blocking bound.
    double alpha = 1.0;
    int blocker = -1;
    int blocker_side = 0;
    for (int i = 0; i < n; ++i) {
      if (res.active[i] != 0 || p[i] == 0.0) continue;
      double a;
      int side;
      if (p[i] > 0) { a = (qp.ub[i] - res.u[i]) / p[i]; side = 1; }
      else { a = (qp.lb[i] - res.u[i]) / p[i]; side = -1; }
      if (a < alpha) {
        alpha = std::max(a, 0.0);
        blocker = i;
        blocker_side = side;
      }
    }
    res.u += alpha * p;
    if (blocker >= 0) {
      res.u[blocker] = blocker_side > 0 ? qp.ub[blocker] : qp.lb[blocker];
      res.active[blocker] = blocker_side;
      ++res.pivots;
    }
  }
}

ShootingSolver::ShootingSolver(std::shared_ptr<OcpProblem> ocp, SqpSettings settings)
    : ocp_(std::move(ocp)), settings_(settings) {}

Eigen::Vector3d ShootingSolver::interval_map(const Eigen::Vector3d& x, double u) const {
  const int sub = ocp_->config().rk_substeps;
  const double h = ocp_->config().delta_N() / sub;
  Eigen::Vector3d xk = x;
  for (int i = 0; i < sub; ++i) xk = rk4_step_sens(*ocp_, xk, u, h).x_next;
  return xk;
}

IntervalSensitivity ShootingSolver::interval_map_with_sens(const Eigen::Vector3d& x, double u) const {
  const int sub = ocp_->config().rk_substeps;
  const double h = ocp_->config().delta_N() / sub;
  IntervalSensitivity out;
  out.x_end = x;
  out.A.setIdentity();
  out.B.setZero();
  for (int i = 0; i < sub; ++i) {
    const StepSens s = rk4_step_sens(*ocp_, out.x_end, u, h);
    out.x_end = s.x_next;
    out.B = s.A * out.B + s.B;
    out.A = s.A * out.A;
  }
  return out;
}

ShootingIterate ShootingSolver::transcribe(const Eigen::Vector3d& x_hat, const ShootingIterate* warm) const {
  const int N = ocp_->config().N;
  ShootingIterate it;
  it.x.resize(N + 1);
  it.u.resize(N, 0.0);
  it.x[0] = x_hat;
  if (warm && static_cast<int>(warm->u.size()) == N && static_cast<int>(warm->x.size()) == N + 1) {
    it.u = warm->u;
    for (int k = 1; k <= N; ++k) it.x[k] = warm->x[k];
  } else {
    // Cold start: zero-input forward rollout.  If that leaves the validity
    // window (distant initial states, long horizons), retry under the
    // saturated linear feedback law, and as a last resort freeze the
    // remaining nodes at the last valid state and let the SQP close the
    // defects.
    bool ok = true;
    for (int k = 0; k < N; ++k) {
      try {
        it.x[k + 1] = interval_map(it.x[k], it.u[k]);
      } catch (const BoundsError&) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      const Eigen::RowVector3d& K = cold_start_gain();
      for (int k = 0; k < N; ++k) {
        it.u[k] = ocp_->project_input(-(K * it.x[k])(0));
        try {
          it.x[k + 1] = interval_map(it.x[k], it.u[k]);
        } catch (const BoundsError&) {
          for (int j = k; j < N; ++j) it.x[j + 1] = it.x[j];
          break;
        }
      }
    }
  }
  return it;
}

const Eigen::RowVector3d& ShootingSolver::cold_start_gain() const {
  if (!cold_gain_) {
    try {
      cold_gain_ = LqrBaseline(*ocp_, ocp_->config().delta_N()).gain().K;
    } catch (const std::exception&) {
      // No stabilizing gain for these weights; fall back to a zero-input
      // rollout.
      cold_gain_ = Eigen::RowVector3d::Zero();
    }
  }
  return *cold_gain_;
}

ShootingIterate ShootingSolver::shift(const ShootingIterate& it) const {
  const int N = static_cast<int>(it.u.size());
  ShootingIterate out = it;
  for (int k = 0; k + 1 < N; ++k) out.u[k] = it.u[k + 1];
  for (int k = 0; k < N; ++k) out.x[k] = it.x[k + 1];
  // Last interval repeated.
  if (N > 0) out.x[N] = it.x[N];
  return out;
}

std::vector<IntervalSensitivity> ShootingSolver::linearize(const ShootingIterate& it) const {
  const int N = static_cast<int>(it.u.size());
  std::vector<IntervalSensitivity> sens(N);
  for (int k = 0; k < N; ++k) {
    try {
      sens[k] = interval_map_with_sens(it.x[k], it.u[k]);
    } catch (const BoundsError& e) {
      throw DivergenceError(std::string(e.what()) + " at shooting node " + std::to_string(k), it.x[k][0], it.x[k][1],
                            it.x[k][2]);
    }
  }
  return sens;
}

CondensedQp ShootingSolver::condense(const ShootingIterate& it, const std::vector<IntervalSensitivity>& sens) const {
  const int N = static_cast<int>(it.u.size());
  const double dN = ocp_->config().delta_N();
  const Eigen::Vector3d Q = ocp_->config().Q;
  const double R = ocp_->config().R;

  CondensedQp qp;
  qp.H = Eigen::MatrixXd::Zero(N, N);
  qp.g = Eigen::VectorXd::Zero(N);
  qp.lb = Eigen::VectorXd::Zero(N);
  qp.ub = Eigen::VectorXd::Zero(N);

  // Affine node-state response: dx_k = Gamma_k du + gamma_k, with dx_0 = 0
  // (the initial node is pinned to the measured state).
  Eigen::MatrixXd Gamma = Eigen::MatrixXd::Zero(3, N);
  Eigen::Vector3d gamma = Eigen::Vector3d::Zero();

  for (int k = 0; k < N; ++k) {
    const Eigen::Vector3d y = ocp_->output(it.x[k]);
    const Eigen::Matrix3d C = ocp_->output_jacobian(it.x[k]);
    const Eigen::Matrix3d Qx = 2.0 * dN * C.transpose() * Q.asDiagonal() * C;
    const Eigen::Vector3d dl_dx = dN * C.transpose() * (2.0 * Q.cwiseProduct(y));
    const double dl_du = dN * 2.0 * R * it.u[k];

    qp.H.noalias() += Gamma.transpose() * Qx * Gamma;
    qp.H(k, k) += 2.0 * dN * R;
    qp.g.noalias() += Gamma.transpose() * (dl_dx + Qx * gamma);
    qp.g[k] += dl_du;

    qp.lb[k] = ocp_->u_lower() - it.u[k];
    qp.ub[k] = ocp_->u_upper() - it.u[k];

    const Eigen::Vector3d defect = sens[k].x_end - it.x[k + 1];
    gamma = sens[k].A * gamma + defect;
    Eigen::MatrixXd next = sens[k].A * Gamma;
    next.col(k) += sens[k].B;
    Gamma = std::move(next);
  }
  return qp;
}

double ShootingSolver::objective(const ShootingIterate& it) const {
  const int N = static_cast<int>(it.u.size());
  const double dN = ocp_->config().delta_N();
  double J = 0.0;
  for (int k = 0; k < N; ++k) J += dN * ocp_->stage_cost_xu(it.x[k], it.u[k]);
  return J;
}

double ShootingSolver::max_defect(const ShootingIterate& it) const {
  const int N = static_cast<int>(it.u.size());
  double d = 0.0;
  for (int k = 0; k < N; ++k) d = std::max(d, (interval_map(it.x[k], it.u[k]) - it.x[k + 1]).lpNorm<Eigen::Infinity>());
  return d;
}

namespace {

// Recover the node-state increments implied by the condensed step.
void apply_step(ShootingIterate& it, const std::vector<IntervalSensitivity>& sens, const Eigen::VectorXd& du,
                double alpha) {
  const int N = static_cast<int>(it.u.size());
  Eigen::Vector3d dx = Eigen::Vector3d::Zero();
  for (int k = 0; k < N; ++k) {
    const Eigen::Vector3d defect = sens[k].x_end - it.x[k + 1];
    const Eigen::Vector3d dx_next = sens[k].A * dx + sens[k].B * du[k] + defect;
    it.u[k] += alpha * du[k];
    it.x[k + 1] += alpha * dx_next;
    dx = dx_next;
  }
}

double sum_defect_l1(const ShootingSolver& solver, const ShootingIterate& it) {
  const int N = static_cast<int>(it.u.size());
  double d = 0.0;
  for (int k = 0; k < N; ++k) d += (solver.interval_map(it.x[k], it.u[k]) - it.x[k + 1]).lpNorm<1>();
  return d;
}

}  // namespace

SolveResult ShootingSolver::sqp_solve(const Eigen::Vector3d& x_hat, const ShootingIterate* warm) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult res;
  ShootingIterate it = transcribe(x_hat, warm);

  try {
    for (int iter = 0; iter <= settings_.max_iter; ++iter) {
      const auto sens = linearize(it);
      const CondensedQp qp = condense(it, sens);

      double defect = 0.0;
      for (size_t k = 0; k < sens.size(); ++k)
        defect = std::max(defect, (sens[k].x_end - it.x[k + 1]).lpNorm<Eigen::Infinity>());

      // Stationarity: projected condensed gradient.
      double pg = 0.0;
      for (int k = 0; k < static_cast<int>(it.u.size()); ++k) {
        const double proj = std::clamp(it.u[k] - qp.g[k], ocp_->u_lower(), ocp_->u_upper());
        pg = std::max(pg, std::abs(it.u[k] - proj));
      }
      res.kkt_residual = pg;
      res.max_defect = defect;
      res.iterations = iter;
      if (pg < settings_.tol_kkt && defect < settings_.tol_defect) {
        res.status = SolveStatus::converged;
        break;
      }
      if (iter == settings_.max_iter) {
        res.status = SolveStatus::max_iter;
        break;
      }

      const BoxQpResult qpres = solve_box_qp(qp);
      if (qpres.status != SolveStatus::converged) {
        res.status = SolveStatus::qp_failure;
        res.message = "box QP did not converge (" + std::to_string(qpres.pivots) + " pivots)";
        break;
      }

      if (defect < settings_.full_step_defect) {
        apply_step(it, sens, qpres.u, 1.0);
      } else {
        // Merit-function backtracking on objective + defect penalty.
        const double mu = settings_.merit_penalty;
        const double phi0 = objective(it) + mu * sum_defect_l1(*this, it);
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls <= settings_.max_linesearch; ++ls) {
          ShootingIterate trial = it;
          try {
            apply_step(trial, sens, qpres.u, alpha);
            const double phi = objective(trial) + mu * sum_defect_l1(*this, trial);
            if (phi < phi0 - 1e-14) {
              it = std::move(trial);
              accepted = true;
              break;
            }
          } catch (const BoundsError&) {
            // Trial left the validity window; halve the step.
          }
          alpha *= 0.5;
        }
        if (!accepted) {
          res.status = SolveStatus::max_iter;
          res.message = "merit line search found no descent step";
          break;
        }
      }
    }
  } catch (const DivergenceError& e) {
    res.status = SolveStatus::domain_error;
    res.message = e.what();
  }

  res.u = it.u;
  res.x = it.x;
  try {
    res.objective = objective(it);
  } catch (const BoundsError&) {
    res.objective = std::numeric_limits<double>::quiet_NaN();
  }
  if (res.status == SolveStatus::converged) {
    prev_ = it;
    has_prev_ = true;
  }
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

SolveResult ShootingSolver::rti_step(const Eigen::Vector3d& x_hat) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult res;
  ShootingIterate warm;
  if (has_prev_) warm = shift(prev_);
  ShootingIterate it = transcribe(x_hat, has_prev_ ? &warm : nullptr);

  try {
    const auto sens = linearize(it);
    const CondensedQp qp = condense(it, sens);
    const BoxQpResult qpres = solve_box_qp(qp);
    if (qpres.status != SolveStatus::converged) {
      res.status = SolveStatus::qp_failure;
      res.message = "box QP did not converge";
    } else {
      apply_step(it, sens, qpres.u, 1.0);
      res.status = SolveStatus::converged;
      double pg = 0.0;
      for (int k = 0; k < static_cast<int>(it.u.size()); ++k) {
        const double proj = std::clamp(it.u[k] - qp.g[k], ocp_->u_lower(), ocp_->u_upper());
        pg = std::max(pg, std::abs(it.u[k] - proj));
      }
      res.kkt_residual = pg;
      res.iterations = 1;
      prev_ = it;
      has_prev_ = true;
    }
  } catch (const DivergenceError& e) {
    res.status = SolveStatus::domain_error;
    res.message = e.what();
  }

  res.u = it.u;
  res.x = it.x;
  try {
    res.objective = objective(it);
    res.max_defect = max_defect(it);
  } catch (const BoundsError&) {
    res.objective = std::numeric_limits<double>::quiet_NaN();
  }
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace maglev
