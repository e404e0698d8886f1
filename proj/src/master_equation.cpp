#include "eitloc/master_equation.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace eitloc {

void LevelScheme::validate() const {
  if (!(gamma_e >= 0.0) || !std::isfinite(gamma_e)) {
    throw std::invalid_argument("excited-state decay rate must be >= 0");
  }
  double sum = 0.0;
  for (double b : branching) {
    if (!(b >= 0.0)) {
      throw std::invalid_argument("branching fractions must be >= 0");
    }
    sum += b;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("branching fractions must sum to 1");
  }
  for (double g : ground_relaxation) {
    if (!(g >= 0.0)) {
      throw std::invalid_argument("ground relaxation rates must be >= 0");
    }
  }
  if (!(ground_dephasing >= 0.0)) {
    throw std::invalid_argument("ground dephasing rate must be >= 0");
  }
}

}  // namespace eitloc
