#include "eitloc/quantum_core.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace eitloc {

namespace {

void require_drive(double omega_p, double omega_c) {
  if (omega_p == 0.0 && omega_c == 0.0) {
    throw std::domain_error(
        "lambda system undefined: probe and coupling Rabi frequencies are "
        "both zero");
  }
}

// Multiply v by -1 if needed so that component `idx` has the sign requested;
// if that component vanishes, make the largest-magnitude component positive.
void fix_gauge(StateVector3& v, int idx, double sign) {
  double pivot = v[idx].real();
  if (std::abs(pivot) < 1e-14) {
    int imax = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    }
    pivot = v[imax].real();
    sign = 1.0;
  }
  if (pivot * sign < 0.0) {
    for (auto& c : v) c = -c;
  }
}

}  // namespace

RabiFrequency::RabiFrequency(double v) : value(v) {
  if (!std::isfinite(v) || v < 0.0) {
    throw std::domain_error("Rabi frequency must be finite and non-negative");
  }
}

Detuning::Detuning(double v) : value(v) {
  if (!std::isfinite(v)) {
    throw std::domain_error("detuning must be finite");
  }
}

MixingAngles mixing_angles(RabiFrequency omega_p, RabiFrequency omega_c,
                           Detuning delta1) {
  require_drive(omega_p.value, omega_c.value);
  const double omega_tot = std::hypot(omega_p.value, omega_c.value);
  return {std::atan2(omega_p.value, omega_c.value),
          0.5 * std::atan2(omega_tot, delta1.value)};
}

StateVector3 dark_state(RabiFrequency omega_p, RabiFrequency omega_c) {
  require_drive(omega_p.value, omega_c.value);
  const double theta = std::atan2(omega_p.value, omega_c.value);
  return {std::cos(theta), -std::sin(theta), 0.0};
}

double dark_state_population_b(RabiFrequency omega_p, RabiFrequency omega_c) {
  require_drive(omega_p.value, omega_c.value);
  const double p2 = omega_p.value * omega_p.value;
  const double c2 = omega_c.value * omega_c.value;
  return p2 / (p2 + c2);
}

DressedStates dressed_eigensystem(RabiFrequency omega_p, RabiFrequency omega_c,
                                  Detuning delta1, Detuning delta2) {
  require_drive(omega_p.value, omega_c.value);

  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  h(1, 1) = -(delta1.value - delta2.value);
  h(2, 2) = -delta1.value;
  h(0, 2) = h(2, 0) = -0.5 * omega_p.value;
  h(1, 2) = h(2, 1) = -0.5 * omega_c.value;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("dressed-state diagonalization failed");
  }

  // Ascending eigenvalues: the light-shifted |a+> lies lowest and |a->
  // highest for every detuning; the dark state sits at zero between them
  // at two-photon resonance.
  DressedStates out;
  const auto& vals = solver.eigenvalues();
  const auto& vecs = solver.eigenvectors();
  out.lambda_plus = vals(0);
  out.lambda_zero = vals(1);
  out.lambda_minus = vals(2);
  for (int i = 0; i < 3; ++i) {
    out.a_plus[i] = vecs(i, 0);
    out.a_zero[i] = vecs(i, 1);
    out.a_minus[i] = vecs(i, 2);
  }
  fix_gauge(out.a_plus, 2, +1.0);   // cos(phi) > 0
  fix_gauge(out.a_zero, 0, +1.0);   // cos(theta) >= 0
  fix_gauge(out.a_minus, 2, -1.0);  // -sin(phi) < 0
  return out;
}

double transfer_fwhm_estimate(RabiFrequency omega_p, RabiFrequency omega_c_max,
                              double wavelength_m) {
  if (omega_c_max.value == 0.0) {
    throw std::domain_error(
        "transfer width undefined for zero peak coupling Rabi frequency");
  }
  if (!(wavelength_m > 0.0)) {
    throw std::domain_error("wavelength must be positive");
  }
  return wavelength_m * omega_p.value / omega_c_max.value;
}

}  // namespace eitloc
