#include "maglev/guideway.hpp"

#include <cmath>
#include <numbers>

namespace maglev {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double to_unit(std::uint64_t v) { return (static_cast<double>(v >> 11) + 0.5) / 9007199254740992.0; }

// Smoothstep blend, zero slope at both ends.
double smooth(double t) { return t * t * (3.0 - 2.0 * t); }
double smooth_d(double t) { return 6.0 * t * (1.0 - t); }

}  // namespace

void GuidewayModel::validate() const {
  if (!(lambda_gw > 0)) throw ConfigError("guideway.lambda_gw must be > 0");
  if (amplitude < 0 || sigma_offset < 0 || unevenness_amp < 0) throw ConfigError("guideway amplitudes must be >= 0");
  if (kind == GuidewayKind::realistic && !(ramp_length > 0)) throw ConfigError("guideway.ramp_length must be > 0");
  if (unevenness_amp > 0 && !(unevenness_wavelength > 0)) throw ConfigError("guideway unevenness wavelength invalid");
}

double guideway_frequency(double v_mps, double lambda_gw) { return v_mps / lambda_gw; }

std::pair<double, double> guideway_approx(double t, double v_mps, double lambda_gw, double amplitude) {
  const double f = guideway_frequency(v_mps, lambda_gw);
  const double phase = kPi * f * t;
  const double sn = std::sin(phase);
  const double sgn = sn >= 0.0 ? 1.0 : -1.0;  // right derivative at girder boundaries
  return {amplitude * std::abs(sn), amplitude * kPi * f * std::cos(phase) * sgn};
}

double girder_offset(std::uint64_t seed, std::int64_t n, double sigma) {
  const std::uint64_t h = splitmix64(seed ^ (static_cast<std::uint64_t>(n) * 0x9E3779B97F4A7C15ULL));
  const double u1 = to_unit(h);
  const double u2 = to_unit(splitmix64(h));
  return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

std::pair<double, double> guideway_realistic(double t, double v_mps, const GuidewayModel& m) {
  const double x = v_mps * t;
  const double lambda = m.lambda_gw;
  const auto n = static_cast<std::int64_t>(std::floor(x / lambda));
  const double xi = x - static_cast<double>(n) * lambda;  // position within girder

  // Bending bump (same shape as the approximated profile).
  const double phase = kPi * x / lambda;
  const double sn = std::sin(phase);
  const double sgn = sn >= 0.0 ? 1.0 : -1.0;
  double d = m.amplitude * std::abs(sn);
  double d_dx = m.amplitude * (kPi / lambda) * std::cos(phase) * sgn;

  // Pillar offset, blended over the transition ramp at the girder start so
  // the profile stays C^1.
  const double off_prev = girder_offset(m.seed, n - 1, m.sigma_offset);
  const double off_cur = girder_offset(m.seed, n, m.sigma_offset);
  if (xi < m.ramp_length) {
    const double th = xi / m.ramp_length;
    d += off_prev + (off_cur - off_prev) * smooth(th);
    d_dx += (off_cur - off_prev) * smooth_d(th) / m.ramp_length;
  } else {
    d += off_cur;
  }

  // Stator-pack unevenness harmonic.
  if (m.unevenness_amp > 0) {
    const double w = 2.0 * kPi / m.unevenness_wavelength;
    d += m.unevenness_amp * std::sin(w * x);
    d_dx += m.unevenness_amp * w * std::cos(w * x);
  }

  return {d, d_dx * v_mps};
}

std::pair<double, double> guideway_eval(double t, double v_mps, const GuidewayModel& m) {
  switch (m.kind) {
    case GuidewayKind::none:
      return {0.0, 0.0};
    case GuidewayKind::approx:
      return guideway_approx(t, v_mps, m.lambda_gw, m.amplitude);
    case GuidewayKind::realistic:
      return guideway_realistic(t, v_mps, m);
  }
  return {0.0, 0.0};
}

}  // namespace maglev
