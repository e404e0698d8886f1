#include "eitloc/scan_profile.hpp"

namespace eitloc {

double extract_fwhm(const std::vector<double>& positions,
                    const std::vector<double>& values) {
  if (positions.size() != values.size())
    throw std::invalid_argument("positions and values differ in length");
  if (positions.size() < 3)
    throw std::invalid_argument("need at least three samples to locate a peak");
  for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
    if (!(positions[i] < positions[i + 1]))
      throw std::invalid_argument("positions must be strictly increasing");
  }

  const std::size_t peak = static_cast<std::size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());
  const double half = 0.5 * values[peak];

  double right = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = peak; i + 1 < values.size(); ++i) {
    if (values[i] >= half && values[i + 1] < half) {
      right = detail::interpolate_crossing(positions[i], values[i],
                                           positions[i + 1], values[i + 1],
                                           half);
      break;
    }
  }
  double left = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = peak; i-- > 0;) {
    if (values[i + 1] >= half && values[i] < half) {
      left = detail::interpolate_crossing(positions[i], values[i],
                                          positions[i + 1], values[i + 1],
                                          half);
      break;
    }
  }
  if (std::isnan(right) || std::isnan(left))
    throw std::runtime_error(
        "half-maximum crossing not bracketed by the scan grid");
  return right - left;
}

}  // namespace eitloc
