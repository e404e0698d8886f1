#include "eitloc/standing_wave.hpp"

#include <cmath>
#include <stdexcept>

namespace eitloc {

StandingWave::StandingWave(double omega_max_value, double omega_min_value,
                           double node_position_m, double wavelength_m)
    : omega_max(omega_max_value), omega_min(omega_min_value),
      node_position(node_position_m), wavelength(wavelength_m) {
  if (!(omega_min >= 0.0) || !(omega_max >= omega_min)) {
    throw std::invalid_argument(
        "standing wave requires 0 <= omega_min <= omega_max");
  }
  if (!(wavelength > 0.0)) {
    throw std::invalid_argument("standing-wave wavelength must be positive");
  }
}

double StandingWave::rabi_at(double x) const {
  const double k = 2.0 * constants::pi / wavelength;
  const double s = std::sin(k * (x - node_position));
  const double min2 = omega_min * omega_min;
  const double max2 = omega_max * omega_max;
  return std::sqrt(min2 + (max2 - min2) * s * s);
}

}  // namespace eitloc
