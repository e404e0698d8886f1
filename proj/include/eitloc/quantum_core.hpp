// Three-level lambda-system analytics: mixing angles, dressed states and the
// dark-state localization estimate.
//
// Basis ordering is (|a>, |b>, |e>). The probe couples a<->e with Rabi
// frequency omega_p, the coupling laser couples b<->e with omega_c. The
// interaction Hamiltonian used here (units of Gamma_a, hbar = 1) is
//
//   H = [ 0         0            -omega_p/2 ]
//       [ 0         -(d1 - d2)   -omega_c/2 ]
//       [ -omega_p/2 -omega_c/2  -d1        ]
//
// with d1, d2 the one-photon detunings of the lasers driving a<->e and
// b<->e. With this sign convention the dressed eigenvectors are
//
//   |a+> = sin(theta) sin(phi) |a> + cos(theta) sin(phi) |b> + cos(phi) |e>
//   |a0> = cos(theta) |a> - sin(theta) |b>
//   |a-> = sin(theta) cos(phi) |a> + cos(theta) cos(phi) |b> - sin(phi) |e>
//
// at two-photon resonance (d1 == d2), with tan(theta) = omega_p/omega_c and
// tan(2 phi) = sqrt(omega_p^2 + omega_c^2)/d1, both angles in [0, pi/2].
//
// Note the four-level master equation (master_equation.hpp) uses the frame
// with the opposite sign on the detuning diagonal; the dark state |a0| is
// the same in both conventions, which test suites verify explicitly.
#pragma once

#include <array>
#include <complex>

namespace eitloc {

// Non-negative Rabi frequency in units of Gamma_a.
struct RabiFrequency {
  double value;
  explicit RabiFrequency(double v);
};

// Signed detuning in units of Gamma_a.
struct Detuning {
  double value;
  explicit Detuning(double v);
};

struct MixingAngles {
  double theta;  // rad, in [0, pi/2]
  double phi;    // rad, in [0, pi/2]
};

using StateVector3 = std::array<std::complex<double>, 3>;

struct DressedStates {
  StateVector3 a_plus;
  StateVector3 a_zero;
  StateVector3 a_minus;
  // Eigenvalues of H (units of Gamma_a), paired with the vectors above.
  double lambda_plus;
  double lambda_zero;
  double lambda_minus;
};

// theta = atan2(omega_p, omega_c), phi = atan2(omega_tot, d1)/2.
// Throws std::domain_error if both Rabi frequencies vanish.
MixingAngles mixing_angles(RabiFrequency omega_p, RabiFrequency omega_c,
                           Detuning delta1);

// Normalized dark state cos(theta)|a> - sin(theta)|b> (zero |e> component).
StateVector3 dark_state(RabiFrequency omega_p, RabiFrequency omega_c);

// |b> population of the dark state, omega_p^2 / (omega_p^2 + omega_c^2).
double dark_state_population_b(RabiFrequency omega_p, RabiFrequency omega_c);

// Full dressed eigensystem of H above. At two-photon resonance the vectors
// match the closed forms quoted in the header comment to 1e-12; away from it
// the matrix is diagonalized numerically and the role labels follow the
// eigenvalue order (lambda_plus < lambda_zero < lambda_minus).
DressedStates dressed_eigensystem(RabiFrequency omega_p, RabiFrequency omega_c,
                                  Detuning delta1, Detuning delta2);

// Spatial width of the dark-state transfer region for a standing-wave
// coupling beam: lambda * omega_p / omega_c_max. Throws std::domain_error
// on omega_c_max == 0.
double transfer_fwhm_estimate(RabiFrequency omega_p, RabiFrequency omega_c_max,
                              double wavelength_m);

}  // namespace eitloc
