// Spatial profile of the coupling field formed by a counter-propagating
// beam pair, and the lattice geometry that places qubits relative to its
// nodes. Lengths are SI meters; Rabi amplitudes are in units of Gamma_a.
#pragma once

#include "eitloc/units.hpp"

namespace eitloc {

// Beam-pair interference with field amplitudes E1 +- E2 mapping to
// (omega_max, omega_min):
//   Omega(x) = sqrt(omega_min^2 + (omega_max^2 - omega_min^2) sin^2(k dx)),
// k = 2 pi / lambda, dx = x - node_position. A balanced pair (omega_min = 0)
// has true zeros at the nodes; an intensity imbalance lifts them.
struct StandingWave {
  double omega_max = 0.0;  // Gamma_a, at the antinodes
  double omega_min = 0.0;  // Gamma_a, at the nodes
  double node_position = 0.0;                    // m
  double wavelength = constants::lambda_d2;      // m

  StandingWave() = default;
  StandingWave(double omega_max_value, double omega_min_value,
               double node_position_m,
               double wavelength_m = constants::lambda_d2);

  double rabi_at(double x) const;
};

// Trap spacing relative to the addressing light: the lattice constant is
// commensurate with the D2 line, lambda_lattice = (3/2) lambda_D2, so
// neighbors of a node-centered qubit sit at coupling-field antinodes.
struct LatticeGeometry {
  static constexpr double lambda_lattice = 1.5 * constants::lambda_d2;
  static constexpr double qubit_spacing = 0.5 * lambda_lattice;
  static constexpr int qubits_in_probe_spot = 3;
};

}  // namespace eitloc
