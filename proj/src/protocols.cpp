#include "eitloc/protocols.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace eitloc {

namespace {

[[noreturn]] void rethrow_with_position(const char* protocol_name, double x) {
  try {
    throw;
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << protocol_name << " failed at x = " << x * 1e9
        << " nm: " << e.what();
    throw std::runtime_error(msg.str());
  }
}

template <typename Point>
void mirror_half(const HalfScan<Point>& half, std::vector<double>& positions,
                 std::vector<Point>& points) {
  const std::size_t n = half.x.size();
  positions.clear();
  points.clear();
  positions.reserve(2 * n - 1);
  points.reserve(2 * n - 1);
  for (std::size_t i = n; i-- > 1;) {
    positions.push_back(-half.x[i]);
    points.push_back(half.points[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    positions.push_back(half.x[i]);
    points.push_back(half.points[i]);
  }
}

template <typename Point, typename Value>
ScanProfile profile_from(const std::vector<double>& positions,
                         const std::vector<Point>& points, double fwhm,
                         Value&& value) {
  ScanProfile profile;
  profile.positions = positions;
  profile.values.reserve(points.size());
  for (const auto& p : points) profile.values.push_back(value(p));
  profile.fwhm = fwhm;
  return profile;
}

double relative_mismatch(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale < 1e-12) return 0.0;
  return std::abs(a - b) / scale;
}

}  // namespace

void DetectionModel::validate() const {
  if (!(combined_efficiency > 0.0) || !(combined_efficiency <= 1.0))
    throw std::invalid_argument(
        "combined detection efficiency must lie in (0, 1]");
  if (!(numerical_aperture > 0.0) || !(numerical_aperture <= 1.0))
    throw std::invalid_argument("numerical aperture must lie in (0, 1]");
  if (!(downstream_efficiency > 0.0) || !(downstream_efficiency <= 1.0))
    throw std::invalid_argument(
        "downstream collection efficiency must lie in (0, 1]");
}

ReadoutPoint readout_point(const ReadoutProtocol& protocol, double x) {
  try {
    protocol.detection.validate();
    protocol.scheme.validate();
    if (protocol.wave.omega_min != 0.0)
      throw std::invalid_argument(
          "readout requires a balanced beam pair during the EIT pulse "
          "(omega_min = 0); the intensity imbalance belongs to the repump");

    const auto& sched = protocol.schedule;
    const double oc_eit = protocol.wave.rabi_at(x);

    auto eit_drive = [&sched, oc_eit](double t) {
      DriveSnapshot d;
      d.omega_p = sched.probe.value(t);
      d.set_omega_c(oc_eit * sched.coupling.value(t));
      return d;
    };
    RateBound eit_bound{sched.probe.peak, "probe Rabi frequency"};
    eit_bound.consider(oc_eit, "coupling Rabi frequency");

    double oc_repump = 0.0;
    if (sched.repump) {
      const StandingWave repump_wave(
          protocol.wave.omega_max,
          sched.repump_min_fraction * protocol.wave.omega_max,
          protocol.wave.node_position, protocol.wave.wavelength);
      oc_repump = repump_wave.rabi_at(x);
    }

    ReadoutPoint result;
    DensityMatrix<4> rho = DensityMatrix<4>::Zero();
    rho(lv_b, lv_b) = 1.0;

    const int cycles = protocol.compose == SequenceComposition::sequential
                           ? sched.repeat_count
                           : 1;
    for (int cycle = 0; cycle < cycles; ++cycle) {
      const auto eit =
          evolve<4>(rho, 0.0, sched.coupling.end(), protocol.scheme, eit_drive,
                    eit_bound, protocol.evolve_options);
      result.photons_eit += scattered_photons(eit, protocol.scheme.gamma_e);
      result.steps += static_cast<long>(eit.ee_record.size()) - 1;
      rho = eit.final_state();

      if (sched.repump) {
        auto repump_drive = [&sched, oc_repump](double t) {
          DriveSnapshot d;
          d.set_omega_c(oc_repump * sched.repump->value(t));
          return d;
        };
        RateBound repump_bound{oc_repump, "repump coupling Rabi frequency"};
        const auto repump =
            evolve<4>(rho, sched.repump->t_start, sched.repump->end(),
                      protocol.scheme, repump_drive, repump_bound,
                      protocol.evolve_options);
        result.photons_repump +=
            scattered_photons(repump, protocol.scheme.gamma_e);
        result.steps += static_cast<long>(repump.ee_record.size()) - 1;
        rho = repump.final_state();
      }
    }
    if (protocol.compose == SequenceComposition::reset) {
      result.photons_eit *= sched.repeat_count;
      result.photons_repump *= sched.repeat_count;
    }
    result.photons = result.photons_eit + result.photons_repump;
    result.detected = result.photons * protocol.detection.combined_efficiency;
    return result;
  } catch (const std::exception&) {
    rethrow_with_position("readout", x);
  }
}

ScanProfile ReadoutScan::photon_profile() const {
  return profile_from(positions, points, fwhm,
                      [](const ReadoutPoint& p) { return p.photons; });
}

ScanProfile ReadoutScan::detected_profile() const {
  return profile_from(positions, points, fwhm,
                      [](const ReadoutPoint& p) { return p.detected; });
}

ReadoutScan readout_scan(const ReadoutProtocol& protocol,
                         const SymmetricGridSpec& grid, int jobs) {
  const auto half = scan_half_profile<ReadoutPoint>(
      grid, jobs,
      [&](double dx) {
        return readout_point(protocol, protocol.wave.node_position + dx);
      },
      [](const ReadoutPoint& p) { return p.photons; });

  ReadoutScan scan;
  mirror_half(half, scan.positions, scan.points);
  std::vector<double> photon_values(half.points.size());
  for (std::size_t i = 0; i < half.points.size(); ++i)
    photon_values[i] = half.points[i].photons;
  scan.fwhm = half_profile_fwhm(half.x, photon_values);
  return scan;
}

CrosstalkReport neighbor_crosstalk(const ReadoutProtocol& protocol,
                                   const QubitArrayContext& context) {
  CrosstalkReport report;
  report.node_photons = readout_point(protocol, context.target_position).photons;
  const auto neighbors = context.neighbor_positions();
  report.neighbor_photons =
      std::max(readout_point(protocol, neighbors[0]).photons,
               readout_point(protocol, neighbors[1]).photons);
  report.ratio = report.node_photons > 0.0
                     ? report.neighbor_photons / report.node_photons
                     : std::numeric_limits<double>::quiet_NaN();
  const double bw = protocol.schedule.bandwidth() / protocol.wave.omega_max;
  report.bandwidth_ratio_sq = bw * bw;
  return report;
}

PhaseGatePoint phase_gate_point(const PhaseGateProtocol& protocol, double x) {
  try {
    protocol.scheme.validate();
    const auto& sched = protocol.schedule;
    const double delta = sched.stark_detuning;
    if (sched.stark && delta == 0.0)
      throw std::domain_error(
          "Stark laser detuning must be nonzero for the phase gate");

    const double oc = protocol.wave.rabi_at(x);
    const bool effective = protocol.mode == StarkMode::effective;

    auto drive = [&sched, oc, delta, effective](double t) {
      DriveSnapshot d;
      d.omega_p = sched.probe.value(t);
      d.set_omega_c(oc * sched.coupling.value(t));
      if (sched.stark) {
        const double os = sched.stark->value(t);
        if (os != 0.0) {
          if (effective) {
            d.stark_shift = os * os / (2.0 * delta);
            const double amplitude = os / (2.0 * delta);
            d.stark_admix = amplitude * amplitude;
          } else {
            d.stark_coupling = {-0.5 * os * std::cos(delta * t),
                                0.5 * os * std::sin(delta * t)};
          }
        }
      }
      return d;
    };

    RateBound bound{sched.probe.peak, "probe Rabi frequency"};
    bound.consider(oc, "coupling Rabi frequency");
    if (sched.stark) {
      bound.consider(sched.stark->peak, "Stark Rabi frequency");
      if (!effective) bound.consider(delta, "Stark laser detuning");
    }

    DensityMatrix<5> rho0 = DensityMatrix<5>::Zero();
    rho0(lv_b, lv_b) = 0.5;
    rho0(lv_r, lv_r) = 0.5;
    rho0(lv_b, lv_r) = 0.5;
    rho0(lv_r, lv_b) = 0.5;

    const auto traj =
        evolve<5>(rho0, 0.0, sched.coupling.end(), protocol.scheme, drive,
                  bound, protocol.evolve_options);

    const std::complex<double> before = rho0(lv_b, lv_r);
    const std::complex<double> after = traj.final_state()(lv_b, lv_r);

    PhaseGatePoint result;
    result.steps = static_cast<long>(traj.ee_record.size()) - 1;
    result.phase =
        std::remainder(std::arg(after) - std::arg(before), 2.0 * M_PI);
    const double addressed_population = rho0(lv_b, lv_b).real();
    result.se_probability =
        scattered_photons(traj, protocol.scheme.gamma_e) / addressed_population;
    result.coherence = std::abs(after);
    return result;
  } catch (const std::exception&) {
    rethrow_with_position("phase gate", x);
  }
}

ScanProfile PhaseGateScan::phase_profile() const {
  return profile_from(positions, points, phase_fwhm,
                      [](const PhaseGatePoint& p) { return p.phase; });
}

ScanProfile PhaseGateScan::se_profile() const {
  auto profile = profile_from(positions, points,
                              std::numeric_limits<double>::quiet_NaN(),
                              [](const PhaseGatePoint& p) { return p.se_probability; });
  try {
    profile.fwhm = extract_fwhm(profile.positions, profile.values);
  } catch (const std::exception&) {
    // SE profile may be too flat to bracket; leave the width undefined.
  }
  return profile;
}

PhaseGateScan phase_gate_scan(const PhaseGateProtocol& protocol,
                              const SymmetricGridSpec& grid, int jobs) {
  const auto half = scan_half_profile<PhaseGatePoint>(
      grid, jobs,
      [&](double dx) {
        return phase_gate_point(protocol, protocol.wave.node_position + dx);
      },
      [](const PhaseGatePoint& p) { return p.phase; });

  PhaseGateScan scan;
  mirror_half(half, scan.positions, scan.points);
  std::vector<double> phase_values(half.points.size());
  for (std::size_t i = 0; i < half.points.size(); ++i)
    phase_values[i] = half.points[i].phase;
  scan.phase_fwhm = half_profile_fwhm(half.x, phase_values);
  return scan;
}

StarkModeComparison compare_stark_modes(const PhaseGateProtocol& protocol,
                                        double x, double tolerance) {
  PhaseGateProtocol variant = protocol;
  variant.mode = StarkMode::effective;
  StarkModeComparison cmp;
  cmp.effective = phase_gate_point(variant, x);
  variant.mode = StarkMode::explicit_drive;
  cmp.explicit_drive = phase_gate_point(variant, x);
  cmp.phase_mismatch =
      relative_mismatch(cmp.effective.phase, cmp.explicit_drive.phase);
  cmp.se_mismatch = relative_mismatch(cmp.effective.se_probability,
                                      cmp.explicit_drive.se_probability);
  cmp.within_tolerance =
      cmp.phase_mismatch <= tolerance && cmp.se_mismatch <= tolerance;
  return cmp;
}

StarkShift stark_effective_shift(double omega_stark, double delta) {
  if (!(omega_stark >= 0.0) || !std::isfinite(omega_stark))
    throw std::invalid_argument(
        "Stark Rabi amplitude must be non-negative and finite");
  if (delta == 0.0 || !std::isfinite(delta))
    throw std::domain_error(
        "Stark detuning must be nonzero to divide out the light shift");
  StarkShift shift;
  shift.level_shift = omega_stark * omega_stark / (2.0 * delta);
  const double amplitude = omega_stark / (2.0 * delta);
  shift.excited_fraction = amplitude * amplitude;
  shift.well_separated = std::abs(delta) >= 10.0 * omega_stark;
  return shift;
}

}  // namespace eitloc
