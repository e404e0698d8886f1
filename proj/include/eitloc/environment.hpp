// Environmental physics around the addressing protocols: the thermal spread
// of a lattice-trapped atom, which smears measured profiles, and the field a
// fluorescing atom scatters onto its neighbors, which perturbs their drives.
#pragma once

#include <Eigen/Dense>
#include <complex>

#include "eitloc/protocols.hpp"
#include "eitloc/scan_profile.hpp"
#include "eitloc/units.hpp"

namespace eitloc {

// One well of the optical lattice U0 sin^2(k x) in harmonic approximation:
// omega = k sqrt(2 U0 / m).
struct TrapModel {
  double depth = 0.0;                                     // J
  double lattice_wavelength = constants::lambda_lattice;  // m
  double mass = constants::mass_rb87;                     // kg

  static TrapModel from_depth_millikelvin(double millikelvin);

  void validate() const;
  double angular_frequency() const;  // rad/s
};

// RMS width of the motional ground state, sqrt(hbar / (2 m omega));
// 8.34 nm for a 5 mK deep lattice.
double ground_state_sigma(const TrapModel& trap);

// FWHM of a Gaussian density of rms width sigma, 2 sqrt(2 ln 2) sigma.
double gaussian_fwhm(double sigma);

// Smears a profile with the Gaussian position density of rms width sigma
// (meters). The grid must be uniformly spaced and extend at least 5 sigma
// beyond the above-half-maximum feature (std::domain_error otherwise). The
// kernel is truncated at 6 sigma and renormalized per source cell, so the
// integrated signal is conserved to rounding; sigma = 0 is the identity.
ScanProfile convolve_profile(const ScanProfile& profile, double sigma);

enum class DipolePolarization { pi, sigma_plus, sigma_minus };

// Transition dipole moment of a single F=1 -> F'=0 decay channel, which
// carries one third of the total linewidth: d^2 = 3 pi eps0 hbar (Gamma_a/3)
// / k^3.
double d2_channel_dipole_moment();  // C m

// Oscillating point dipole on the D2 line. The quantization axis is z, so
// pi radiates along z and sigma+- carry the spherical unit vectors
// -+(x +- iy)/sqrt(2).
struct DipoleSource {
  DipolePolarization polarization = DipolePolarization::sigma_plus;
  double moment = d2_channel_dipole_moment();        // C m
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();  // m
  double wavenumber = 2.0 * constants::pi / constants::lambda_d2;  // 1/m

  Eigen::Vector3cd moment_vector() const;  // complex dipole vector, C m
};

// Complex field amplitude (V/m) at `observation`, keeping the radiation,
// intermediate and static zones:
//   E = k^3/(4 pi eps0) e^{ikr} [ (p - rhat (rhat.p)) / (kr)
//                               + (3 rhat (rhat.p) - p) (1/(kr)^3 - i/(kr)^2) ].
// Throws std::domain_error at the source position.
Eigen::Vector3cd dipole_field(const DipoleSource& source,
                              const Eigen::Vector3d& observation);

// Rabi amplitudes the scattered field imprints on an atom displaced by
// `separation` along the quantization axis. The sigma channels radiate
// fully transverse to that axis and dominate; the pi channel survives on
// axis only through the near-field terms. Convention: the field oscillates
// as Re[E e^{-iwt}], and Omega = d |eps* . E| / (2 hbar) on the transition
// with polarization eps and moment d.
struct NeighborPerturbation {
  double sigma_rabi = 0.0;  // rad/s, transverse sigma-channel field
  double pi_rabi = 0.0;     // rad/s, axial near field of the pi channel
  double peak_rabi = 0.0;   // rad/s, the larger of the two
};

NeighborPerturbation neighbor_perturbation(double separation);

// Drive-synchronous perturbation imprinted on a neighbor's probe and
// coupling transitions, peak Rabi amplitudes in Gamma_a units. The time
// dependence follows the radiating atom's excited population,
// eps(t) = peak sqrt(rho_ee(t) / max rho_ee).
struct PerturbationPair {
  double probe_peak = 0.0;     // Gamma_a
  double coupling_peak = 0.0;  // Gamma_a

  static PerturbationPair from_scattered_dipole(
      double separation = LatticeGeometry::qubit_spacing);
};

struct CrosstalkDelta {
  double baseline_photons = 0.0;  // neighbor photons, no perturbation
  double worst_photons = 0.0;     // count at the worst perturbation phase
  double worst_phase = 0.0;       // rad, relative to the drives
  double absolute_change = 0.0;   // photons
  double relative_change = 0.0;   // NaN when the baseline count is zero
  bool relative_valid = false;
};

// Change of a neighbor's photon count over one readout sequence when the
// node atom's scattered field is added to its drives. The optical phase of
// the scattered field is unknown, so the worst case over {0, pi/2, pi,
// 3 pi/2} is reported. The baseline run shares the perturbed runs' step
// size, so a zero-amplitude perturbation changes nothing, exactly.
CrosstalkDelta crosstalk_delta(const ReadoutProtocol& protocol,
                               const QubitArrayContext& context,
                               const PerturbationPair& perturbation);

}  // namespace eitloc
