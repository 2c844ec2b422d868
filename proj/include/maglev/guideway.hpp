#pragma once

#include <cstdint>
#include <utility>

#include "maglev/errors.hpp"

namespace maglev {

enum class GuidewayKind { none, approx, realistic };

/// Guideway disturbance model.  `approx` is the pure bending bump
/// a |sin(pi f_gw t)| with f_gw = v / lambda_gw; `realistic` adds seeded
/// per-girder pillar offsets (blended over a transition ramp) and a
/// sinusoidal unevenness harmonic.
struct GuidewayModel {
  GuidewayKind kind = GuidewayKind::none;
  double lambda_gw = 24.768;          ///< girder length [m]
  double amplitude = 1.5e-3;          ///< bending amplitude [m]
  double sigma_offset = 2.35e-3;      ///< pillar-offset std deviation [m]
  double unevenness_amp = 0.2e-3;     ///< [m]
  double unevenness_wavelength = 3.1; ///< [m]
  double ramp_length = 2.5;           ///< offset transition ramp [m]
  std::uint64_t seed = 1;

  void validate() const;
};

/// Disturbance frequency of the girder bending, f_gw = v / lambda_gw.
double guideway_frequency(double v_mps, double lambda_gw);

/// Deflection and rate of the approximated profile at time t for vehicle
/// speed v [m/s].
std::pair<double, double> guideway_approx(double t, double v_mps, double lambda_gw, double amplitude);

/// Deflection and rate of the realistic profile (bending + seeded pillar
/// offsets + unevenness), deterministic per seed.
std::pair<double, double> guideway_realistic(double t, double v_mps, const GuidewayModel& model);

std::pair<double, double> guideway_eval(double t, double v_mps, const GuidewayModel& model);

/// Seeded Gaussian pillar offset of girder n (exposed for statistics tests).
double girder_offset(std::uint64_t seed, std::int64_t n, double sigma);

}  // namespace maglev
