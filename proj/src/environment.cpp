#include "eitloc/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace eitloc {

namespace {

// Dense envelope sampled at the integrator step; linear interpolation,
// clamped at the window ends where the excited population is negligible.
struct SampledEnvelope {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;

  double value(double t) const {
    if (values.size() < 2 || dt <= 0.0)
      return values.empty() ? 0.0 : values.front();
    const double s = (t - t0) / dt;
    if (s <= 0.0) return values.front();
    const double last = static_cast<double>(values.size() - 1);
    if (s >= last) return values.back();
    const auto i = static_cast<std::size_t>(s);
    const double f = s - static_cast<double>(i);
    return values[i] + f * (values[i + 1] - values[i]);
  }
};

SampledEnvelope envelope_from(const Trajectory<4>& traj, double max_ee) {
  SampledEnvelope env;
  env.t0 = traj.t_begin;
  env.dt = traj.step_dt;
  env.values.reserve(traj.ee_record.size());
  for (double ee : traj.ee_record)
    env.values.push_back(ee > 0.0 ? std::sqrt(ee / max_ee) : 0.0);
  return env;
}

struct SequencePerturbation {
  const PerturbationPair* pair = nullptr;  // also pins the step size
  const SampledEnvelope* eit = nullptr;
  const SampledEnvelope* repump = nullptr;
  std::complex<double> phase{1.0, 0.0};
};

struct SequenceRun {
  Trajectory<4> eit;
  std::optional<Trajectory<4>> repump;
  double photons = 0.0;
};

SequenceRun run_readout_windows(const ReadoutProtocol& protocol, double x,
                                const SequencePerturbation& pert) {
  const auto& sched = protocol.schedule;
  const double oc_eit = protocol.wave.rabi_at(x);
  const std::complex<double> probe_scale =
      pert.pair ? -0.5 * pert.pair->probe_peak * pert.phase
                : std::complex<double>(0.0);
  const std::complex<double> coupling_scale =
      pert.pair ? -0.5 * pert.pair->coupling_peak * pert.phase
                : std::complex<double>(0.0);

  auto eit_drive = [&sched, oc_eit, probe_scale, coupling_scale,
                    &pert](double t) {
    DriveSnapshot d;
    d.omega_p = sched.probe.value(t);
    d.set_omega_c(oc_eit * sched.coupling.value(t));
    if (pert.eit) {
      const double env = pert.eit->value(t);
      d.probe_perturbation = probe_scale * env;
      d.coupling_perturbation = coupling_scale * env;
    }
    return d;
  };
  RateBound bound{sched.probe.peak, "probe Rabi frequency"};
  bound.consider(oc_eit, "coupling Rabi frequency");
  if (pert.pair) {
    bound.consider(pert.pair->probe_peak, "probe perturbation");
    bound.consider(pert.pair->coupling_peak, "coupling perturbation");
  }

  DensityMatrix<4> rho = DensityMatrix<4>::Zero();
  rho(lv_b, lv_b) = 1.0;

  SequenceRun run;
  run.eit = evolve<4>(rho, 0.0, sched.coupling.end(), protocol.scheme,
                      eit_drive, bound, protocol.evolve_options);
  run.photons += scattered_photons(run.eit, protocol.scheme.gamma_e);

  if (sched.repump) {
    const StandingWave repump_wave(
        protocol.wave.omega_max,
        sched.repump_min_fraction * protocol.wave.omega_max,
        protocol.wave.node_position, protocol.wave.wavelength);
    const double oc_repump = repump_wave.rabi_at(x);
    auto repump_drive = [&sched, oc_repump, probe_scale, coupling_scale,
                         &pert](double t) {
      DriveSnapshot d;
      d.set_omega_c(oc_repump * sched.repump->value(t));
      if (pert.repump) {
        const double env = pert.repump->value(t);
        d.probe_perturbation = probe_scale * env;
        d.coupling_perturbation = coupling_scale * env;
      }
      return d;
    };
    RateBound repump_bound{oc_repump, "repump coupling Rabi frequency"};
    if (pert.pair) {
      repump_bound.consider(pert.pair->probe_peak, "probe perturbation");
      repump_bound.consider(pert.pair->coupling_peak, "coupling perturbation");
    }
    run.repump = evolve<4>(run.eit.final_state(), sched.repump->t_start,
                           sched.repump->end(), protocol.scheme, repump_drive,
                           repump_bound, protocol.evolve_options);
    run.photons += scattered_photons(*run.repump, protocol.scheme.gamma_e);
  }
  return run;
}

}  // namespace

TrapModel TrapModel::from_depth_millikelvin(double millikelvin) {
  TrapModel trap;
  trap.depth = constants::k_boltzmann * millikelvin * 1e-3;
  return trap;
}

void TrapModel::validate() const {
  if (!(depth > 0.0) || !std::isfinite(depth))
    throw std::invalid_argument("trap depth must be positive and finite");
  if (!(lattice_wavelength > 0.0) || !std::isfinite(lattice_wavelength))
    throw std::invalid_argument("lattice wavelength must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw std::invalid_argument("atomic mass must be positive");
}

double TrapModel::angular_frequency() const {
  validate();
  const double k_lat = 2.0 * constants::pi / lattice_wavelength;
  return k_lat * std::sqrt(2.0 * depth / mass);
}

double ground_state_sigma(const TrapModel& trap) {
  return std::sqrt(constants::hbar /
                   (2.0 * trap.mass * trap.angular_frequency()));
}

double gaussian_fwhm(double sigma) {
  return 2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma;
}

ScanProfile convolve_profile(const ScanProfile& profile, double sigma) {
  const auto& x = profile.positions;
  const auto& v = profile.values;
  if (x.size() != v.size())
    throw std::invalid_argument(
        "profile positions and values differ in length");
  if (x.size() < 2)
    throw std::invalid_argument("profile needs at least two samples");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument(
        "thermal spread sigma must be finite and non-negative");

  const double spacing = x[1] - x[0];
  if (!(spacing > 0.0))
    throw std::invalid_argument("profile positions must be ascending");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (std::abs((x[i] - x[i - 1]) - spacing) > 1e-9 * spacing)
      throw std::invalid_argument(
          "convolution requires a uniformly spaced position grid");
  }

  const double peak = *std::max_element(v.begin(), v.end());
  if (sigma > 0.0 && peak > 0.0) {
    // The smeared tails must stay on the grid, or counts leak off the ends.
    const double half = 0.5 * peak;
    std::size_t lo = 0;
    while (v[lo] < half) ++lo;
    std::size_t hi = v.size() - 1;
    while (v[hi] < half) --hi;
    const double left_margin = x[lo] - x.front();
    const double right_margin = x.back() - x[hi];
    if (left_margin < 5.0 * sigma || right_margin < 5.0 * sigma) {
      std::ostringstream msg;
      msg << "position grid must extend at least 5 sigma = "
          << 5.0 * sigma * 1e9
          << " nm beyond the half-maximum feature; margins are "
          << left_margin * 1e9 << " nm (left) and " << right_margin * 1e9
          << " nm (right)";
      throw std::domain_error(msg.str());
    }
  }

  ScanProfile out;
  out.positions = x;
  const auto n = static_cast<long>(x.size());
  const long radius =
      sigma > 0.0 ? std::lround(std::ceil(6.0 * sigma / spacing)) : 0;
  if (radius == 0) {
    out.values = v;
  } else {
    out.values.assign(v.size(), 0.0);
    std::vector<double> weight(static_cast<std::size_t>(radius) + 1);
    for (long k = 0; k <= radius; ++k) {
      const double u = static_cast<double>(k) * spacing / sigma;
      weight[static_cast<std::size_t>(k)] = std::exp(-0.5 * u * u);
    }
    for (long j = 0; j < n; ++j) {
      const long lo = std::max(0L, j - radius);
      const long hi = std::min(n - 1, j + radius);
      double norm = 0.0;
      for (long i = lo; i <= hi; ++i)
        norm += weight[static_cast<std::size_t>(std::labs(i - j))];
      const double scale = v[static_cast<std::size_t>(j)] / norm;
      for (long i = lo; i <= hi; ++i)
        out.values[static_cast<std::size_t>(i)] +=
            scale * weight[static_cast<std::size_t>(std::labs(i - j))];
    }
  }

  try {
    out.fwhm = extract_fwhm(out.positions, out.values);
  } catch (const std::exception&) {
    // Too flat to bracket a half maximum; leave the width undefined.
  }
  return out;
}

double d2_channel_dipole_moment() {
  const double k = 2.0 * constants::pi / constants::lambda_d2;
  const double gamma_channel = constants::gamma_a_si / 3.0;
  return std::sqrt(3.0 * constants::pi * constants::epsilon0 *
                   constants::hbar * gamma_channel / (k * k * k));
}

Eigen::Vector3cd DipoleSource::moment_vector() const {
  using C = std::complex<double>;
  const double s = moment / std::sqrt(2.0);
  switch (polarization) {
    case DipolePolarization::pi:
      return {C(0.0), C(0.0), C(moment)};
    case DipolePolarization::sigma_plus:
      return {C(-s), C(0.0, -s), C(0.0)};
    case DipolePolarization::sigma_minus:
      return {C(s), C(0.0, -s), C(0.0)};
  }
  throw std::logic_error("unknown dipole polarization");
}

Eigen::Vector3cd dipole_field(const DipoleSource& source,
                              const Eigen::Vector3d& observation) {
  if (!(source.wavenumber > 0.0) || !std::isfinite(source.wavenumber))
    throw std::invalid_argument("dipole wavenumber must be positive");
  if (!std::isfinite(source.moment))
    throw std::invalid_argument("dipole moment must be finite");
  const Eigen::Vector3d rel = observation - source.origin;
  const double r = rel.norm();
  if (!(r > 0.0))
    throw std::domain_error(
        "dipole field is singular at the source position");

  const Eigen::Vector3cd rhat = (rel / r).cast<std::complex<double>>();
  const Eigen::Vector3cd p = source.moment_vector();
  const std::complex<double> radial = rhat.dot(p);
  const Eigen::Vector3cd transverse = p - radial * rhat;
  const Eigen::Vector3cd longitudinal = 3.0 * radial * rhat - p;

  const double kr = source.wavenumber * r;
  const std::complex<double> i_unit(0.0, 1.0);
  const std::complex<double> phase = std::exp(i_unit * kr);
  const double k3 = source.wavenumber * source.wavenumber * source.wavenumber;
  const double prefactor = k3 / (4.0 * constants::pi * constants::epsilon0);
  const std::complex<double> far = 1.0 / kr;
  const std::complex<double> near = 1.0 / (kr * kr * kr) - i_unit / (kr * kr);
  return prefactor * phase * (far * transverse + near * longitudinal);
}

NeighborPerturbation neighbor_perturbation(double separation) {
  if (!(separation > 0.0) || !std::isfinite(separation))
    throw std::invalid_argument("neighbor separation must be positive");
  const Eigen::Vector3d obs(0.0, 0.0, separation);

  DipoleSource sigma_source;
  sigma_source.polarization = DipolePolarization::sigma_plus;
  DipoleSource pi_source;
  pi_source.polarization = DipolePolarization::pi;

  const Eigen::Vector3cd e_sigma = dipole_field(sigma_source, obs);
  const Eigen::Vector3cd e_pi = dipole_field(pi_source, obs);

  const Eigen::Vector3cd eps_sigma =
      sigma_source.moment_vector() / sigma_source.moment;

  const double d = d2_channel_dipole_moment();
  NeighborPerturbation out;
  out.sigma_rabi =
      d * std::abs(eps_sigma.dot(e_sigma)) / (2.0 * constants::hbar);
  out.pi_rabi = d * std::abs(e_pi(2)) / (2.0 * constants::hbar);
  out.peak_rabi = std::max(out.sigma_rabi, out.pi_rabi);
  return out;
}

PerturbationPair PerturbationPair::from_scattered_dipole(double separation) {
  const double peak =
      angular_si_to_internal(neighbor_perturbation(separation).peak_rabi);
  return {peak, peak};
}

CrosstalkDelta crosstalk_delta(const ReadoutProtocol& protocol,
                               const QubitArrayContext& context,
                               const PerturbationPair& perturbation) {
  protocol.scheme.validate();
  if (protocol.wave.omega_min != 0.0)
    throw std::invalid_argument(
        "crosstalk readout requires a balanced beam pair (omega_min = 0)");
  if (!(perturbation.probe_peak >= 0.0) ||
      !std::isfinite(perturbation.probe_peak) ||
      !(perturbation.coupling_peak >= 0.0) ||
      !std::isfinite(perturbation.coupling_peak))
    throw std::invalid_argument(
        "perturbation Rabi amplitudes must be non-negative and finite");

  const SequenceRun node =
      run_readout_windows(protocol, context.target_position, {});
  double max_ee = 0.0;
  for (double ee : node.eit.ee_record) max_ee = std::max(max_ee, ee);
  if (node.repump)
    for (double ee : node.repump->ee_record) max_ee = std::max(max_ee, ee);

  SampledEnvelope env_eit, env_repump;
  const bool have_envelope = max_ee > 0.0;
  if (have_envelope) {
    env_eit = envelope_from(node.eit, max_ee);
    if (node.repump) env_repump = envelope_from(*node.repump, max_ee);
  }

  const double x_neighbor =
      context.target_position + context.neighbor_spacing;

  SequencePerturbation off;
  off.pair = &perturbation;

  CrosstalkDelta result;
  result.baseline_photons = run_readout_windows(protocol, x_neighbor, off).photons;
  result.worst_photons = result.baseline_photons;

  if (have_envelope) {
    for (int quadrant = 0; quadrant < 4; ++quadrant) {
      const double chi = 0.5 * constants::pi * quadrant;
      SequencePerturbation on = off;
      on.eit = &env_eit;
      on.repump = node.repump ? &env_repump : nullptr;
      on.phase = std::polar(1.0, chi);
      const double photons = run_readout_windows(protocol, x_neighbor, on).photons;
      const double change = std::abs(photons - result.baseline_photons);
      if (change > result.absolute_change) {
        result.absolute_change = change;
        result.worst_photons = photons;
        result.worst_phase = chi;
      }
    }
  }

  result.relative_valid = result.baseline_photons > 0.0;
  result.relative_change =
      result.relative_valid
          ? result.absolute_change / result.baseline_photons
          : std::numeric_limits<double>::quiet_NaN();
  return result;
}

}  // namespace eitloc
