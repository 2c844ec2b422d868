#include "maglev/estimator.hpp"

namespace maglev {

void EstimatorConfig::validate() const {
  if (!(omega_c > 0)) throw ConfigError("estimator.omega_c must be > 0");
  if (!(delta > 0)) throw ConfigError("estimator sampling period must be > 0");
}

FilterState estimator_reset(const EstimatorConfig& config) {
  config.validate();
  return FilterState{};
}

EstimateResult estimator_update(const FilterState& fs, double s_meas, double zdd_meas, double I_meas,
                                const Equilibrium& eq, const EstimatorConfig& config) {
  const double delta = config.delta;
  const double c = config.omega_c * delta / 2.0;

  EstimateResult out;
  out.fs = fs;
  if (!out.fs.primed) {
    out.fs.gap_prev = s_meas;
    out.fs.primed = true;
  }

  // F1: low pass on the differenced air gap.
  const double v_gap = (s_meas - out.fs.gap_prev) / delta;
  out.fs.lp_y = ((1.0 - c) * out.fs.lp_y + c * (v_gap + out.fs.lp_x_prev)) / (1.0 + c);
  out.fs.lp_x_prev = v_gap;
  out.fs.gap_prev = s_meas;

  // F2: integrator on the measured acceleration.
  out.fs.acc_int += zdd_meas * delta;

  // F3: high pass completing the complementary pair.
  out.fs.hp_y = ((1.0 - c) * out.fs.hp_y + out.fs.acc_int - out.fs.hp_x_prev) / (1.0 + c);
  out.fs.hp_x_prev = out.fs.acc_int;

  out.x_hat.ds = s_meas - eq.s0;
  out.x_hat.sdot = out.fs.lp_y + out.fs.hp_y;
  out.x_hat.dI = I_meas - eq.I0;
  return out;
}

}  // namespace maglev
