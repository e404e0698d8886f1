// Spatial scan containers and full-width-at-half-maximum extraction.
//
// Profiles produced by the addressing protocols are even about the target
// node, so scans evaluate x >= 0 only and mirror. The half-maximum crossing
// is located by linear interpolation between the two bracketing samples;
// adaptive refinement keeps the crossing cell narrower than FWHM/10.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "eitloc/parallel.hpp"

namespace eitloc {

struct ScanProfile {
  std::vector<double> positions;  // metres, strictly increasing
  std::vector<double> values;
  double fwhm = std::numeric_limits<double>::quiet_NaN();  // metres
};

// FWHM by linear interpolation of the half-maximum crossings on either side
// of the global peak. Throws if a crossing is not bracketed by the grid.
double extract_fwhm(const std::vector<double>& positions,
                    const std::vector<double>& values);

struct SymmetricGridSpec {
  double half_range = 0.0;        // metres, scan covers [-half_range, +half_range]
  double coarse_step = 0.0;       // metres
  bool adaptive = true;
  double refine_divisor = 10.0;   // stop once crossing cell <= FWHM / divisor
  int max_rounds = 5;

  void validate() const {
    if (!(half_range > 0.0) || !std::isfinite(half_range))
      throw std::invalid_argument("scan half_range must be positive");
    if (!(coarse_step > 0.0) || coarse_step > half_range)
      throw std::invalid_argument(
          "scan coarse_step must be positive and no larger than half_range");
    if (!(refine_divisor >= 1.0))
      throw std::invalid_argument("scan refine_divisor must be >= 1");
    if (max_rounds < 0)
      throw std::invalid_argument("scan max_rounds must be non-negative");
  }
};

template <typename Point>
struct HalfScan {
  std::vector<double> x;       // ascending, x[0] == 0
  std::vector<Point> points;
};

namespace detail {

inline constexpr std::size_t no_cell = std::numeric_limits<std::size_t>::max();

// Crossing of value == half between samples i and i+1, walking right from
// the peak. Returns the cell index, or no_cell if the profile never drops
// below half within the grid.
inline std::size_t half_crossing_cell(const std::vector<double>& v,
                                      std::size_t peak, double half) {
  for (std::size_t i = peak; i + 1 < v.size(); ++i) {
    if (v[i] >= half && v[i + 1] < half) return i;
  }
  return no_cell;
}

inline double interpolate_crossing(double x0, double v0, double x1, double v1,
                                   double half) {
  if (v0 == v1) return 0.5 * (x0 + x1);
  return x0 + (half - v0) * (x1 - x0) / (v1 - v0);
}

}  // namespace detail

// Half-profile FWHM for an even profile sampled on x >= 0 with its peak at
// the first sample.
inline double half_profile_fwhm(const std::vector<double>& x,
                                const std::vector<double>& v) {
  if (x.size() < 2 || x.size() != v.size())
    throw std::invalid_argument("half-profile needs at least two samples");
  const std::size_t peak = static_cast<std::size_t>(
      std::max_element(v.begin(), v.end()) - v.begin());
  const double half = 0.5 * v[peak];
  const std::size_t cell = detail::half_crossing_cell(v, peak, half);
  if (cell == detail::no_cell)
    throw std::runtime_error(
        "scan range too small: profile never falls below half maximum");
  const double xc = detail::interpolate_crossing(x[cell], v[cell], x[cell + 1],
                                                 v[cell + 1], half);
  return 2.0 * xc;
}

// Evaluates eval(x) on an adaptively refined grid over [0, half_range].
// primary(point) supplies the scalar used for peak and crossing detection.
// Evaluation is data-parallel over positions with a deterministic merge.
template <typename Point, typename Eval, typename Primary>
HalfScan<Point> scan_half_profile(const SymmetricGridSpec& grid, int jobs,
                                  Eval&& eval, Primary&& primary) {
  grid.validate();
  const std::size_t n_coarse = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(grid.half_range / grid.coarse_step)));

  HalfScan<Point> scan;
  scan.x.resize(n_coarse + 1);
  for (std::size_t i = 0; i <= n_coarse; ++i)
    scan.x[i] = grid.half_range * static_cast<double>(i) /
                static_cast<double>(n_coarse);
  scan.points.resize(scan.x.size());
  parallel_for_indexed(scan.x.size(), jobs,
                       [&](std::size_t i) { scan.points[i] = eval(scan.x[i]); });

  if (!grid.adaptive) return scan;

  for (int round = 0; round < grid.max_rounds; ++round) {
    std::vector<double> v(scan.x.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = primary(scan.points[i]);
    const std::size_t peak = static_cast<std::size_t>(
        std::max_element(v.begin(), v.end()) - v.begin());
    const double half = 0.5 * v[peak];
    const std::size_t cell = detail::half_crossing_cell(v, peak, half);
    if (cell == detail::no_cell)
      throw std::runtime_error(
          "scan range too small: profile never falls below half maximum");
    const double width = scan.x[cell + 1] - scan.x[cell];
    const double xc = detail::interpolate_crossing(
        scan.x[cell], v[cell], scan.x[cell + 1], v[cell + 1], half);
    const double target = 2.0 * xc / grid.refine_divisor;
    if (width <= target) break;

    constexpr int kSplit = 6;
    std::vector<double> fresh;
    fresh.reserve(kSplit - 1);
    for (int k = 1; k < kSplit; ++k)
      fresh.push_back(scan.x[cell] + width * static_cast<double>(k) / kSplit);
    std::vector<Point> fresh_points(fresh.size());
    parallel_for_indexed(fresh.size(), jobs, [&](std::size_t i) {
      fresh_points[i] = eval(fresh[i]);
    });

    scan.x.insert(scan.x.begin() + static_cast<std::ptrdiff_t>(cell) + 1,
                  fresh.begin(), fresh.end());
    scan.points.insert(
        scan.points.begin() + static_cast<std::ptrdiff_t>(cell) + 1,
        fresh_points.begin(), fresh_points.end());
  }
  return scan;
}

// Reflects a half scan about x = 0 into a full profile.
template <typename Point, typename Value>
ScanProfile mirror_to_full(const HalfScan<Point>& half, Value&& value) {
  ScanProfile profile;
  const std::size_t n = half.x.size();
  profile.positions.reserve(2 * n - 1);
  profile.values.reserve(2 * n - 1);
  for (std::size_t i = n; i-- > 1;) {
    profile.positions.push_back(-half.x[i]);
    profile.values.push_back(value(half.points[i]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    profile.positions.push_back(half.x[i]);
    profile.values.push_back(value(half.points[i]));
  }
  profile.fwhm = half_profile_fwhm(half.x, [&] {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = value(half.points[i]);
    return v;
  }());
  return profile;
}

}  // namespace eitloc
