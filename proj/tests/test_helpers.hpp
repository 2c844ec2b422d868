#pragma once

#include <cstdint>
#include <memory>

#include "maglev/controllers.hpp"

namespace maglev::testing {

/// Default system (analytic backend, nominal parameters), finalized.
inline SystemConfig default_system() {
  SystemConfig sys;
  sys.finalize();
  return sys;
}

inline std::shared_ptr<OcpProblem> make_ocp(const SystemConfig& sys) {
  return std::make_shared<OcpProblem>(sys.ocp, sys.plant, sys.model, sys.eq);
}

/// Small deterministic PRNG for test point sampling (splitmix64).
struct TestRng {
  std::uint64_t state;
  explicit TestRng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) {
    const double r = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * r;
  }
};

}  // namespace maglev::testing
