// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dhlab {

enum class PlaneStrategy { sweep, rays };

struct Tolerances {
  double marked = 1e-9;     // |h(a) - sigma(a)|
  double roundtrip = 1e-9;  // |h^-1(h(p)) - p|
  double support = 1e-12;   // deviation from identity (plus tail) outside the support
};

/// Run configuration shared by construction, verification and the CLI.
struct Config {
  std::uint64_t seed = 20240517;
  Tolerances tol;
  int sample_budget = 100000;    // round-trip samples
  int exterior_samples = 10000;  // identity-outside-support samples
  int max_retries = 16;          // ray schedules (plane) or detours per path (n >= 3)
  double min_clearance = 1e-9;   // smallest accepted path clearance
  bool targeted_samples = false; // add samples inside every move's support
  PlaneStrategy plane_strategy = PlaneStrategy::sweep;  // construction used for dim 2

  void validate() const {
    if (!(tol.marked > 0) || !(tol.roundtrip > 0) || !(tol.support > 0))
      throw std::invalid_argument("config: tolerances must be > 0");
    if (sample_budget < 1000) throw std::invalid_argument("config: sample_budget must be >= 1000");
    if (exterior_samples < 1) throw std::invalid_argument("config: exterior_samples must be >= 1");
    if (max_retries < 0) throw std::invalid_argument("config: max_retries must be >= 0");
    if (!(min_clearance >= 0)) throw std::invalid_argument("config: min_clearance must be >= 0");
  }
};

}  // namespace dhlab
