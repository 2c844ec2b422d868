#pragma once

#include <map>
#include <string>
#include <vector>

#include "maglev/metrics.hpp"

namespace maglev {

/// Plain-text `key = value` configuration with dotted section paths.
/// `#` starts a comment; blank lines are ignored.
struct KeyValueConfig {
  std::map<std::string, std::string> values;

  static KeyValueConfig from_file(const std::string& path);

  /// Applies a command-line override of the form `key=value`.
  void set_from_arg(const std::string& arg);
  void set(const std::string& key, const std::string& value) { values[key] = value; }
};

/// Fully resolved run configuration: system, scenario, and per-subcommand
/// sweep parameters.  Every field has a documented default; unknown keys are
/// rejected at parse time.
struct RunConfig {
  SystemConfig sys;
  Scenario scenario;
  RoaGrid roa;
  std::vector<ControllerKind> roa_controllers{ControllerKind::lqr, ControllerKind::mpc_shooting};

  std::vector<double> horizon_T;   ///< horizon sweep values [s]
  std::vector<double> horizon_Qs;  ///< air-gap weights for the sweep
  double horizon_x0_ds = 0.5, horizon_x0_sdot = 0.0, horizon_x0_dI = 0.5;  ///< scaled

  std::vector<double> tune_Qs, tune_Qzdd;
  double tune_QI = 5.0;
  double tune_velocity = 430.0, tune_duration = 2.0;

  double robust_v_min = 50.0, robust_v_max = 650.0, robust_v_step = 50.0;
  double robust_duration = 20.0;
  std::vector<ControllerKind> robust_controllers{ControllerKind::mpc_shooting, ControllerKind::lqr};

  std::vector<double> subopt_T;
  std::vector<double> subopt_dN;
  double subopt_ref_T = 0.1, subopt_ref_dN = 1e-3;
  double subopt_velocity = 430.0, subopt_duration = 2.0;

  std::string model_kind = "analytic";
  std::string table_path;
  std::string out_dir = ".";
  int jobs = 1;

  /// Every key with its final value, for the self-describing CSV headers.
  std::vector<std::pair<std::string, std::string>> resolved() const;
};

/// Builds a RunConfig from key-value pairs; throws ConfigError on unknown
/// keys or invalid values.  Calls SystemConfig::finalize().
RunConfig build_run_config(const KeyValueConfig& kv);

ControllerKind parse_controller(const std::string& name);

}  // namespace maglev
