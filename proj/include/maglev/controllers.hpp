#pragma once

#include <memory>

#include "maglev/scenario.hpp"

namespace maglev {

/// Per-run controller instance.  Inputs and outputs are in physical units;
/// the instance owns its solver workspace and warm starts.
class Controller {
 public:
  virtual ~Controller() = default;

  struct Output {
    double du = 0.0;  ///< voltage deviation dU [V], pre-saturation
    double wall_time = 0.0;
    SolveStatus status = SolveStatus::converged;
  };

  virtual Output compute(const SynthState& x_hat) = 0;
  virtual void set_load_estimate(double) {}
  virtual void reset() {}
};

std::unique_ptr<Controller> make_controller(ControllerKind kind, const SystemConfig& sys, double delta);

}  // namespace maglev
