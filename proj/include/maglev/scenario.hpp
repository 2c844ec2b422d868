#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "maglev/estimator.hpp"
#include "maglev/gpm.hpp"
#include "maglev/guideway.hpp"
#include "maglev/shooting.hpp"

namespace maglev {

/// Everything the solvers and the simulator share: plant, magnet backend,
/// equilibrium, OCP, and solver settings.
struct SystemConfig {
  PlantParams plant;
  std::shared_ptr<const MagnetModel> model;
  double s0 = 0.010;
  Equilibrium eq;
  OcpConfig ocp;
  SqpSettings sqp;
  GpmSettings gpm;
  int gpm_closed_loop_iters = 3;  ///< fast-MPC gradient budget per sample

  /// Builds the analytic backend and the equilibrium from the plant
  /// parameters (call after editing fields).
  void finalize();
};

enum class ControllerKind { mpc_shooting, mpc_rti, mpc_gpm, lqr };

std::string to_string(ControllerKind k);

struct LoadStepProfile {
  double time = 0.0;   ///< step instant [s]
  double force = 0.0;  ///< d_load for t >= time [N]
};

struct NoiseConfig {
  double sigma_s = 0.0;
  double sigma_zdd = 0.0;
  double sigma_I = 0.0;
  std::uint64_t seed = 0;
};

struct Scenario {
  double velocity_kmh = 0.0;
  double duration = 2.0;
  double delta = 1e-3;  ///< controller sampling period [s]
  ControllerKind controller = ControllerKind::mpc_shooting;
  EstimatorConfig estimator;
  GuidewayModel guideway;
  LoadStepProfile load_step;
  NoiseConfig noise;
  bool load_estimator_enabled = true;
  double k_s = 2e6;  ///< load-estimator integral gain [N/(m s)]
  int plant_substeps = 10;  ///< plant integration substeps per delta

  /// Optional non-equilibrium start in shifted coordinates.
  bool x0_set = false;
  double x0_ds = 0.0, x0_sdot = 0.0, x0_dI = 0.0;

  /// Stop early once the scaled state has settled (ROA sweeps).
  bool early_exit_on_settle = false;

  void validate() const;
};

enum class SimVerdict { stable, diverged };

/// Uniformly sampled closed-loop time series plus the final verdict.
struct SimLog {
  std::vector<double> t, s, zdd, I, u, solve_time;
  std::vector<SolveStatus> status;
  SimVerdict verdict = SimVerdict::stable;
  double diverge_time = 0.0;
};

}  // namespace maglev
