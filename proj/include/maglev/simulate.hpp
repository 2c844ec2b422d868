#pragma once

#include "maglev/controllers.hpp"

namespace maglev {

/// Closed-loop simulation: measure, estimate, solve, hold the input over the
/// sampling period, integrate the plant under the time-varying disturbance.
SimLog run_closed_loop(const Scenario& scenario, const SystemConfig& sys);

}  // namespace maglev
