#pragma once

#include <cmath>

namespace cavity {

/// Sinusoidal bedrock of amplitude r on the unit-wavelength strip,
/// b(x) = r sin(pi/2 + 2 pi x), with the crest at x = 0 and the trough at
/// x = 1/2. Ice slides in +x, so cavities open on the downstream face of the
/// crest and can extend across the trough; at heavy cavitation the detached
/// region wraps around the crest itself.
struct BedProfile {
  double r = 0.01;

  double operator()(double x) const { return r * std::sin(M_PI_2 + 2.0 * M_PI * x); }

  /// Bed slope db/dx.
  double slope(double x) const {
    return 2.0 * M_PI * r * std::cos(M_PI_2 + 2.0 * M_PI * x);
  }
};

}  // namespace cavity
