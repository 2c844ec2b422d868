#include "maglev/controllers.hpp"

#include <chrono>

#include "maglev/lqr.hpp"

namespace maglev {

std::string to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::mpc_shooting: return "mpc-shooting";
    case ControllerKind::mpc_rti: return "mpc-rti";
    case ControllerKind::mpc_gpm: return "mpc-gpm";
    case ControllerKind::lqr: return "lqr";
  }
  return "unknown";
}

void SystemConfig::finalize() {
  plant.validate();
  ocp.validate();
  if (!model) model = std::make_shared<AnalyticMagnet>(plant.C, plant.R_c, plant.s_guard_lo, plant.s_guard_hi);
  eq = find_equilibrium(plant, *model, s0);
}

void Scenario::validate() const {
  if (!(delta > 0)) throw ConfigError("scenario.delta must be > 0");
  if (!(duration > 0)) throw ConfigError("scenario.duration must be > 0");
  if (plant_substeps < 1) throw ConfigError("scenario.plant_substeps must be >= 1");
  estimator.validate();
  guideway.validate();
}

namespace {

class ShootingMpcController final : public Controller {
 public:
  ShootingMpcController(const SystemConfig& sys, bool rti, double delta)
      : scaling_(sys.ocp.scaling),
        ocp_(std::make_shared<OcpProblem>(sys.ocp, sys.plant, sys.model, sys.eq)),
        solver_(ocp_, sys.sqp),
        fallback_(*ocp_, delta),
        rti_(rti) {}

  Output compute(const SynthState& x_hat) override {
    const Eigen::Vector3d xs = scaling_.scale_state(x_hat.vec());
    Output out;
    try {
      const SolveResult r = rti_ ? solver_.rti_step(xs) : solver_.sqp_solve(xs, has_warm_ ? &warm_ : nullptr);
      out.status = r.status;
      out.wall_time = r.wall_time;
      if (!r.u.empty() && (r.status == SolveStatus::converged || r.status == SolveStatus::max_iter)) {
        out.du = scaling_.unscale_input(ocp_->project_input(r.u.front()));
      } else {
        // No usable plan; fall back to the linear feedback law.
        out.du = scaling_.unscale_input(ocp_->project_input(fallback_.control(xs)));
      }
      if (!rti_ && r.status == SolveStatus::converged) {
        warm_ = solver_.shift(ShootingIterate{r.x, r.u});
        has_warm_ = true;
      }
    } catch (const DivergenceError&) {
      out.status = SolveStatus::domain_error;
      out.du = scaling_.unscale_input(ocp_->project_input(fallback_.control(xs)));
    }
    return out;
  }

  void set_load_estimate(double F_hat) override { ocp_->set_load_estimate(F_hat); }
  void reset() override {
    solver_.reset();
    has_warm_ = false;
  }

 private:
  ScalingConfig scaling_;
  std::shared_ptr<OcpProblem> ocp_;
  ShootingSolver solver_;
  LqrBaseline fallback_;
  bool rti_;
  ShootingIterate warm_;
  bool has_warm_ = false;
};

class GpmController final : public Controller {
 public:
  GpmController(const SystemConfig& sys, double delta)
      : scaling_(sys.ocp.scaling),
        ocp_(std::make_shared<OcpProblem>(sys.ocp, sys.plant, sys.model, sys.eq)),
        solver_(ocp_, with_budget(sys.gpm, sys.gpm_closed_loop_iters)),
        fallback_(*ocp_, delta),
        delta_(delta) {}

  Output compute(const SynthState& x_hat) override {
    const Eigen::Vector3d xs = scaling_.scale_state(x_hat.vec());
    Output out;
    std::vector<double> warm;
    if (solver_.has_previous()) warm = solver_.shift(solver_.previous_controls(), delta_);
    const SolveResult r = solver_.gpm_solve(xs, warm.empty() ? nullptr : &warm);
    out.status = r.status;
    out.wall_time = r.wall_time;
    if (!r.u.empty() && r.status != SolveStatus::domain_error) {
      out.du = scaling_.unscale_input(ocp_->project_input(r.u.front()));
    } else {
      out.du = scaling_.unscale_input(ocp_->project_input(fallback_.control(xs)));
    }
    return out;
  }

  void set_load_estimate(double F_hat) override { ocp_->set_load_estimate(F_hat); }
  void reset() override { solver_.reset(); }

 private:
  static GpmSettings with_budget(GpmSettings s, int iters) {
    if (iters > 0) s.max_iter = iters;
    return s;
  }

  ScalingConfig scaling_;
  std::shared_ptr<OcpProblem> ocp_;
  GpmSolver solver_;
  LqrBaseline fallback_;
  double delta_;
};

class LqrController final : public Controller {
 public:
  LqrController(const SystemConfig& sys, double delta)
      : scaling_(sys.ocp.scaling), ocp_(sys.ocp, sys.plant, sys.model, sys.eq), baseline_(ocp_, delta) {}

  Output compute(const SynthState& x_hat) override {
    const auto t0 = std::chrono::steady_clock::now();
    Output out;
    out.du = scaling_.unscale_input(baseline_.control(scaling_.scale_state(x_hat.vec())));
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }

 private:
  ScalingConfig scaling_;
  OcpProblem ocp_;
  LqrBaseline baseline_;
};

}  // namespace

std::unique_ptr<Controller> make_controller(ControllerKind kind, const SystemConfig& sys, double delta) {
  switch (kind) {
    case ControllerKind::mpc_shooting: return std::make_unique<ShootingMpcController>(sys, false, delta);
    case ControllerKind::mpc_rti: return std::make_unique<ShootingMpcController>(sys, true, delta);
    case ControllerKind::mpc_gpm: return std::make_unique<GpmController>(sys, delta);
    case ControllerKind::lqr: return std::make_unique<LqrController>(sys, delta);
  }
  throw ConfigError("unknown controller kind");
}

}  // namespace maglev
