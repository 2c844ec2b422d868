#pragma once

#include <vector>

#include "maglev/scenario.hpp"

namespace maglev {

/// L2 norm of a sampled input signal, sqrt(sum u[k]^2).
double l2_norm(const std::vector<double>& u);

/// Relative cumulative suboptimality of a test run against a reference run,
/// evaluated with the OCP stage cost on the logged outputs and inputs.
/// Both logs must share length and sampling.
double rcso(const SimLog& test, const SimLog& ref, const SystemConfig& sys);

/// Stage-cost series of a run (scaled deviation outputs and inputs).
std::vector<double> stage_cost_series(const SimLog& log, const SystemConfig& sys);

/// Sample standard deviations of the sub-series above/below the nominal
/// value; an empty side contributes zero.
std::pair<double, double> asymmetric_std(const std::vector<double>& series, double nominal);

struct RoaGrid {
  double ds_min = -8e-3, ds_max = 8e-3;
  int n_ds = 41;
  double sdot_min = -0.5, sdot_max = 0.5;
  int n_sdot = 41;
  double settle_time = 2.0;
  double tol_frac = 0.01;  ///< stabilized band, fraction of s0
};

struct RoaResult {
  RoaGrid grid;
  std::vector<double> ds_values, sdot_values;
  std::vector<std::uint8_t> stabilized;  ///< row-major, ds outer

  bool at(int i_ds, int i_sdot) const { return stabilized[i_ds * grid.n_sdot + i_sdot] != 0; }
  int count() const;
};

/// Closed-loop stabilization verdict over a grid of initial conditions
/// (no disturbance, start from (ds, sdot, 0)).
RoaResult roa_sweep(const RoaGrid& grid, ControllerKind controller, const SystemConfig& sys, int jobs = 1);

}  // namespace maglev
