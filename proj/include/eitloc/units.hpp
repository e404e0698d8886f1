// Physical constants and the internal unit system.
//
// All rates, Rabi frequencies and detunings are angular frequencies in units
// of the 87Rb D2 decay rate Gamma_a = 2*pi * 6.06 MHz. Time is measured in
// units of 1/Gamma_a. Lengths stay in SI meters.
#pragma once

namespace eitloc {

namespace constants {

inline constexpr double pi = 3.14159265358979323846;

// 87Rb D2 natural linewidth, angular (rad/s).
inline constexpr double gamma_a_si = 2.0 * pi * 6.06e6;

// D2 transition wavelength; the coupling standing wave lives on this line.
inline constexpr double lambda_d2 = 780.0e-9;

// Trapping lattice period is chosen as 3/2 of the D2 wavelength so that
// nearest neighbours of a coupling-node qubit sit at antinodes.
inline constexpr double lambda_lattice = 1.5 * lambda_d2;

// CODATA 2018.
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double k_boltzmann = 1.380649e-23;     // J/K
inline constexpr double epsilon0 = 8.8541878128e-12;    // F/m
inline constexpr double speed_of_light = 2.99792458e8;  // m/s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

inline constexpr double mass_rb87 = 86.909180531 * atomic_mass_unit;

}  // namespace constants

// Seconds -> internal time (units of 1/Gamma_a).
inline constexpr double seconds_to_internal(double s) {
  return s * constants::gamma_a_si;
}

inline constexpr double internal_to_seconds(double t) {
  return t / constants::gamma_a_si;
}

// Convenience for schedule building: microseconds -> internal time.
inline constexpr double microseconds(double us) {
  return seconds_to_internal(us * 1e-6);
}

// Angular rad/s -> units of Gamma_a.
inline constexpr double angular_si_to_internal(double w) {
  return w / constants::gamma_a_si;
}

inline constexpr double internal_to_angular_si(double w) {
  return w * constants::gamma_a_si;
}

}  // namespace eitloc
