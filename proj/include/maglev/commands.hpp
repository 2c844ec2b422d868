#pragma once

#include "maglev/config.hpp"

namespace maglev {

/// Process exit codes shared by all subcommands.
enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 1,
  exit_diverged = 2,
  exit_solver_failure = 3,
};

/// Each command writes CSV files into cfg.out_dir (created if missing) with a
/// comment header embedding the fully resolved configuration, prints a short
/// summary to stdout, and returns an ExitCode.
int cmd_simulate(const RunConfig& cfg);
int cmd_roa(const RunConfig& cfg);
int cmd_horizon_sweep(const RunConfig& cfg);
int cmd_tune_sweep(const RunConfig& cfg);
int cmd_robustness(const RunConfig& cfg);
int cmd_suboptimality(const RunConfig& cfg);

}  // namespace maglev
