#pragma once

#include "maglev/synthesis.hpp"

namespace maglev {

enum class EstimatorMode { ideal, filtered };

struct EstimatorConfig {
  EstimatorMode mode = EstimatorMode::filtered;
  double omega_c = 50.0;  ///< complementary crossover [rad/s]
  double delta = 1e-3;    ///< sampling period [s]

  void validate() const;
};

/// Discrete first-order section (bilinear transform at omega_c):
///   low pass  H_lp(z) = c (1 + z^-1) / ((1+c) - (1-c) z^-1)
///   high pass H_hp(z) = (1 - z^-1) / ((1+c) - (1-c) z^-1)
/// with c = omega_c * delta / 2.  H_lp + H_hp equals one identically, which
/// makes the two velocity paths complementary.
struct FilterState {
  double lp_y = 0.0;       ///< F1 output: low-passed differenced air gap
  double lp_x_prev = 0.0;
  double acc_int = 0.0;    ///< F2: integrator on measured acceleration
  double hp_y = 0.0;       ///< F3 output: high-passed acceleration integral
  double hp_x_prev = 0.0;
  double gap_prev = 0.0;
  bool primed = false;
};

FilterState estimator_reset(const EstimatorConfig& config);

struct EstimateResult {
  SynthState x_hat;
  FilterState fs;
};

/// One filter update from the measured outputs (s, zdd, I).  Gap and current
/// deviations pass through directly; the gap rate is the complementary blend
/// of the two filtered velocity paths.
EstimateResult estimator_update(const FilterState& fs, double s_meas, double zdd_meas, double I_meas,
                                const Equilibrium& eq, const EstimatorConfig& config);

}  // namespace maglev
