#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "eitloc/environment.hpp"
#include "eitloc/protocols.hpp"
#include "eitloc/pulses.hpp"
#include "eitloc/scan_profile.hpp"
#include "eitloc/units.hpp"

using eitloc::convolve_profile;
using eitloc::CrosstalkDelta;
using eitloc::crosstalk_delta;
using eitloc::d2_channel_dipole_moment;
using eitloc::dipole_field;
using eitloc::DipolePolarization;
using eitloc::DipoleSource;
using eitloc::gaussian_fwhm;
using eitloc::ground_state_sigma;
using eitloc::LatticeGeometry;
using eitloc::neighbor_perturbation;
using eitloc::PerturbationPair;
using eitloc::QubitArrayContext;
using eitloc::ReadoutProtocol;
using eitloc::ScanProfile;
using eitloc::StandingWave;
using eitloc::TrapModel;

namespace {

bool message_contains(const std::exception& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

// Uniform grid [-half_range, half_range] sampled from a callable.
template <typename F>
ScanProfile sampled_profile(double half_range, double spacing, F&& f) {
  ScanProfile profile;
  const long n = std::lround(half_range / spacing);
  for (long i = -n; i <= n; ++i) {
    const double x = static_cast<double>(i) * spacing;
    profile.positions.push_back(x);
    profile.values.push_back(f(x));
  }
  return profile;
}

double profile_sum(const ScanProfile& p) {
  return std::accumulate(p.values.begin(), p.values.end(), 0.0);
}

double profile_peak(const ScanProfile& p) {
  return *std::max_element(p.values.begin(), p.values.end());
}

ReadoutProtocol crosstalk_readout(double probe_duration_us,
                                  double rise_us) {
  ReadoutProtocol protocol;
  protocol.wave = StandingWave(18.0, 0.0, 0.0);
  eitloc::ReadoutScheduleParams params;
  params.probe_duration = eitloc::microseconds(probe_duration_us);
  params.t_rise = eitloc::microseconds(rise_us);
  protocol.schedule = eitloc::readout_schedule(params);
  return protocol;
}

}  // namespace

TEST_CASE("ground state width reproduces independent arithmetic") {
  // Recomputed from scratch: omega = (2 pi / lambda) sqrt(2 U0 / m),
  // sigma = sqrt(hbar /
  //  (2 m omega)), with CODATA literals typed here on purpose.
  const double hbar = 1.054571817e-34;
  const double kb = 1.380649e-23;
  const double mass = 86.909180531 * 1.66053906660e-27;
  const double depth = kb * 5.0e-3;
  const double k_lat = 2.0 * M_PI / 1.17e-6;
  const double omega = k_lat * std::sqrt(2.0 * depth / mass);
  const double sigma_oracle = std::sqrt(hbar / (2.0 * mass * omega));

  const TrapModel trap = TrapModel::from_depth_millikelvin(5.0);
  CHECK(trap.angular_frequency() == doctest::Approx(omega).epsilon(1e-12));
  const double sigma = ground_state_sigma(trap);
  CHECK(sigma == doctest::Approx(sigma_oracle).epsilon(1e-12));
  CHECK(sigma == doctest::Approx(8.34e-9).epsilon(2e-3));
  CHECK(gaussian_fwhm(sigma) == doctest::Approx(19.64e-9).epsilon(2e-3));
  CHECK(gaussian_fwhm(1.0) == doctest::Approx(2.354820045).epsilon(1e-9));
}

TEST_CASE("ground state width scales as the inverse fourth root of depth") {
  for (double mk : {1.0, 2.5, 5.0, 10.0}) {
    const TrapModel trap = TrapModel::from_depth_millikelvin(mk);
    TrapModel doubled = trap;
    doubled.depth *= 2.0;
    const double ratio = ground_state_sigma(doubled) / ground_state_sigma(trap);
    CHECK(ratio == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-12));
  }
}

TEST_CASE("trap model rejects unphysical parameters") {
  TrapModel trap = TrapModel::from_depth_millikelvin(5.0);
  trap.depth = -trap.depth;
  CHECK_THROWS_AS(trap.angular_frequency(), std::invalid_argument);
  trap = TrapModel::from_depth_millikelvin(5.0);
  trap.lattice_wavelength = 0.0;
  CHECK_THROWS_AS(trap.validate(), std::invalid_argument);
  trap = TrapModel::from_depth_millikelvin(5.0);
  trap.mass = 0.0;
  CHECK_THROWS_AS(trap.validate(), std::invalid_argument);
  CHECK_THROWS_AS(ground_state_sigma(TrapModel{}), std::invalid_argument);
}

TEST_CASE("zero-width kernel is the identity") {
  const auto profile = sampled_profile(50e-9, 1e-9, [](double x) {
    return std::exp(-x * x / (2.0 * 36e-18));
  });
  const ScanProfile same = convolve_profile(profile, 0.0);
  REQUIRE(same.values.size() == profile.values.size());
  for (std::size_t i = 0; i < same.values.size(); ++i)
    CHECK(same.values[i] == profile.values[i]);

  // A kernel much narrower than the grid spacing degenerates to the same.
  const ScanProfile tiny = convolve_profile(profile, 1e-13);
  for (std::size_t i = 0; i < tiny.values.size(); ++i)
    CHECK(tiny.values[i] == doctest::Approx(profile.values[i]).epsilon(1e-12));
}

TEST_CASE("delta spike convolves to the kernel itself") {
  const double sigma = 8.34e-9;
  ScanProfile spike = sampled_profile(60e-9, 0.5e-9, [](double) { return 0.0; });
  spike.values[spike.values.size() / 2] = 1.0;

  const ScanProfile out = convolve_profile(spike, sigma);
  CHECK(out.fwhm == doctest::Approx(gaussian_fwhm(sigma)).epsilon(1e-2));
  CHECK(profile_sum(out) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(profile_peak(out) <= 1.0);
  // Peak of a normalized discrete Gaussian.
  CHECK(profile_peak(out) ==
        doctest::Approx(0.5e-9 / (std::sqrt(2.0 * M_PI) * sigma)).epsilon(1e-3));
}

TEST_CASE("gaussian on gaussian adds widths in quadrature") {
  const double sigma_in = 5e-9;
  const double sigma_kernel = 8.34e-9;
  const auto profile = sampled_profile(80e-9, 0.5e-9, [=](double x) {
    return 3.7 * std::exp(-x * x / (2.0 * sigma_in * sigma_in));
  });

  const ScanProfile out = convolve_profile(profile, sigma_kernel);
  const double expected =
      gaussian_fwhm(std::hypot(sigma_in, sigma_kernel));
  CHECK(out.fwhm == doctest::Approx(expected).epsilon(0.02));
  CHECK(out.fwhm >= gaussian_fwhm(sigma_in));
  CHECK(out.fwhm >= gaussian_fwhm(sigma_kernel));
  CHECK(profile_sum(out) ==
        doctest::Approx(profile_sum(profile)).epsilon(1e-12));
  CHECK(profile_peak(out) <= profile_peak(profile));
}

TEST_CASE("narrow feature is dominated by the kernel width") {
  const double sigma = 8.34e-9;
  const auto narrow = sampled_profile(60e-9, 0.25e-9, [](double x) {
    const double w = 1e-9;  // 2 nm FWHM squared Lorentzian
    const double u = x / w;
    return 30.0 / ((1.0 + u * u) * (1.0 + u * u));
  });
  const ScanProfile out = convolve_profile(narrow, sigma);
  CHECK(out.fwhm >= gaussian_fwhm(sigma));
  CHECK(out.fwhm <= 1.06 * gaussian_fwhm(sigma));
  CHECK(profile_sum(out) ==
        doctest::Approx(profile_sum(narrow)).epsilon(1e-12));
}

TEST_CASE("convolution agrees with a direct gather away from the edges") {
  const double sigma = 4e-9;
  const double spacing = 1e-9;
  const auto profile = sampled_profile(60e-9, spacing, [](double x) {
    return 2.0 * std::exp(-x * x / (2.0 * 49e-18)) +
           std::exp(-(x - 12e-9) * (x - 12e-9) / (2.0 * 16e-18));
  });
  const ScanProfile out = convolve_profile(profile, sigma);

  const long radius = std::lround(std::ceil(6.0 * sigma / spacing));
  double norm = 0.0;
  for (long k = -radius; k <= radius; ++k)
    norm += std::exp(-0.5 * std::pow(k * spacing / sigma, 2.0));
  const long n = static_cast<long>(profile.values.size());
  for (long i = radius; i < n - radius; ++i) {
    double gathered = 0.0;
    for (long k = -radius; k <= radius; ++k) {
      const long j = i + k;
      if (j < 0 || j >= n) continue;
      gathered += profile.values[static_cast<std::size_t>(j)] *
                  std::exp(-0.5 * std::pow(k * spacing / sigma, 2.0));
    }
    CHECK(out.values[static_cast<std::size_t>(i)] ==
          doctest::Approx(gathered / norm).epsilon(1e-12));
  }
}

TEST_CASE("convolution rejects grids that cannot hold the smeared tails") {
  const double sigma = 8.34e-9;
  const auto tight = sampled_profile(30e-9, 0.5e-9, [](double x) {
    return std::exp(-x * x / (2.0 * 25e-18));
  });
  CHECK_THROWS_WITH_AS(convolve_profile(tight, sigma),
                       doctest::Contains("5 sigma"), std::domain_error);
  try {
    convolve_profile(tight, sigma);
  } catch (const std::domain_error& e) {
    CHECK(message_contains(e, "margin"));
  }
}

TEST_CASE("convolution validates its inputs") {
  ScanProfile profile;
  profile.positions = {0.0, 1e-9, 2e-9, 4e-9};
  profile.values = {0.0, 1.0, 0.0, 0.0};
  CHECK_THROWS_WITH_AS(convolve_profile(profile, 1e-10),
                       doctest::Contains("uniformly spaced"),
                       std::invalid_argument);

  profile.positions = {0.0, 1e-9};
  CHECK_THROWS_AS(convolve_profile(profile, 1e-10), std::invalid_argument);

  profile.positions = {0.0, 1e-9, 2e-9, 3e-9};
  CHECK_THROWS_AS(convolve_profile(profile, -1e-9), std::invalid_argument);
  CHECK_THROWS_AS(
      convolve_profile(profile, std::numeric_limits<double>::quiet_NaN()),
      std::invalid_argument);

  // A flat profile cannot bracket a half maximum: the width stays undefined.
  ScanProfile flat;
  flat.positions = {0.0, 1e-9, 2e-9};
  flat.values = {1.0, 1.0, 1.0};
  const ScanProfile same = convolve_profile(flat, 0.0);
  CHECK(std::isnan(same.fwhm));
}

TEST_CASE("dipole moment of one decay channel matches its linewidth") {
  const double k = 2.0 * M_PI / 780e-9;
  const double gamma_channel = 2.0 * M_PI * 6.06e6 / 3.0;
  const double oracle =
      std::sqrt(3.0 * M_PI * 8.8541878128e-12 * 1.054571817e-34 *
                gamma_channel / (k * k * k));
  CHECK(d2_channel_dipole_moment() ==
        doctest::Approx(oracle).epsilon(1e-12));
  CHECK(d2_channel_dipole_moment() ==
        doctest::Approx(1.4618e-29).epsilon(1e-4));
}

TEST_CASE("dipole field matches component-by-component arithmetic") {
  DipoleSource source;
  source.polarization = DipolePolarization::sigma_minus;
  source.origin = Eigen::Vector3d(0.2e-6, -0.4e-6, 0.1e-6);
  const Eigen::Vector3d obs(1.1e-6, 0.3e-6, -0.6e-6);

  // Independent evaluation with raw doubles.
  const double rx = obs(0) - source.origin(0);
  const double ry = obs(1) - source.origin(1);
  const double rz = obs(2) - source.origin(2);
  const double r = std::sqrt(rx * rx + ry * ry + rz * rz);
  const double ux = rx / r, uy = ry / r, uz = rz / r;
  const double s = source.moment / std::sqrt(2.0);
  const std::complex<double> px(s, 0.0), py(0.0, -s), pz(0.0, 0.0);
  const std::complex<double> radial = ux * px + uy * py + uz * pz;
  const double kr = source.wavenumber * r;
  const std::complex<double> i_unit(0.0, 1.0);
  const std::complex<double> pref =
      std::pow(source.wavenumber, 3.0) /
      (4.0 * M_PI * 8.8541878128e-12) * std::exp(i_unit * kr);
  const std::complex<double> far = 1.0 / kr;
  const std::complex<double> near =
      1.0 / (kr * kr * kr) - i_unit / (kr * kr);
  const std::complex<double> ex =
      pref * (far * (px - radial * ux) + near * (3.0 * radial * ux - px));
  const std::complex<double> ey =
      pref * (far * (py - radial * uy) + near * (3.0 * radial * uy - py));
  const std::complex<double> ez =
      pref * (far * (pz - radial * uz) + near * (3.0 * radial * uz - pz));

  const Eigen::Vector3cd field = dipole_field(source, obs);
  CHECK(std::abs(field(0) - ex) <= 1e-10 * std::abs(ex));
  CHECK(std::abs(field(1) - ey) <= 1e-10 * std::abs(ey));
  CHECK(std::abs(field(2) - ez) <= 1e-10 * std::abs(ez));
}

TEST_CASE("far field falls off as 1/r transverse to the line of sight") {
  DipoleSource source;
  source.polarization = DipolePolarization::pi;
  const double k = source.wavenumber;

  for (double kr : {120.0, 1000.0}) {
    const Eigen::Vector3d obs =
        (kr / k) * Eigen::Vector3d(1.0, 0.0, 0.0);  // perpendicular to p
    const Eigen::Vector3cd full = dipole_field(source, obs);

    // Textbook radiation field k^2 (rhat x p) x rhat e^{ikr} / (4 pi eps0 r).
    const std::complex<double> i_unit(0.0, 1.0);
    const std::complex<double> radiation =
        k * k * source.moment / (4.0 * M_PI * 8.8541878128e-12 * (kr / k)) *
        std::exp(i_unit * kr);
    const Eigen::Vector3cd far(std::complex<double>(0.0),
                               std::complex<double>(0.0), radiation);
    CHECK((full - far).norm() <= 0.01 * far.norm());

    // Longitudinal fraction dies off with another power of kr.
    const Eigen::Vector3d rhat(1.0, 0.0, 0.0);
    const std::complex<double> axial =
        rhat.cast<std::complex<double>>().dot(full);
    CHECK(std::abs(axial) <= 2.5 / kr * full.norm());
  }

  // Doubling the distance halves the far-field amplitude.
  const Eigen::Vector3d obs1 = (500.0 / k) * Eigen::Vector3d(0.0, 1.0, 0.0);
  const double ratio = dipole_field(source, 2.0 * obs1).norm() /
                       dipole_field(source, obs1).norm();
  CHECK(ratio == doctest::Approx(0.5).epsilon(5e-3));
}

TEST_CASE("field along the dipole axis keeps only the near-zone terms") {
  DipoleSource source;
  source.polarization = DipolePolarization::pi;  // p along z
  const double k = source.wavenumber;
  const double kr = 150.0;
  const Eigen::Vector3d on_axis(0.0, 0.0, kr / k);
  const Eigen::Vector3d transverse_dir(kr / k, 0.0, 0.0);

  const Eigen::Vector3cd axial = dipole_field(source, on_axis);
  const Eigen::Vector3cd transverse = dipole_field(source, transverse_dir);
  CHECK(std::abs(axial(0)) == 0.0);
  CHECK(std::abs(axial(1)) == 0.0);
  // |2 (1/kr^3 - i/kr^2)| / |1/kr - 1/kr^3 + i/kr^2| ~ 2/kr.
  CHECK(axial.norm() / transverse.norm() ==
        doctest::Approx(2.0 / kr).epsilon(0.05));
}

TEST_CASE("dipole field is singular only at the source") {
  DipoleSource source;
  CHECK_THROWS_AS(dipole_field(source, source.origin), std::domain_error);
  source.origin = Eigen::Vector3d(1e-6, 2e-6, -1e-6);
  CHECK_THROWS_AS(dipole_field(source, source.origin), std::domain_error);
  CHECK_NOTHROW(dipole_field(source, Eigen::Vector3d::Zero()));
}

TEST_CASE("scattered field at the neighbor site reaches the expected Rabi") {
  const double spacing = LatticeGeometry::qubit_spacing;
  // One and a half coupling wavelengths per lattice period puts the
  // neighbor at kr = 3 pi / 2.
  const double kr = 2.0 * M_PI / 780e-9 * spacing;
  CHECK(kr == doctest::Approx(1.5 * M_PI).epsilon(1e-12));

  const auto pert = neighbor_perturbation(spacing);

  // Closed forms in linewidth units: the sigma channels arrive transverse,
  // Omega_sigma = (Gamma/8) |1/kr - 1/kr^3 + i/kr^2|; the pi channel keeps
  // only the near zone, Omega_pi = (Gamma/4) |1/kr^3 - i/kr^2|.
  const double gamma = 2.0 * M_PI * 6.06e6;
  const std::complex<double> i_unit(0.0, 1.0);
  const std::complex<double> f_t =
      1.0 / kr - 1.0 / (kr * kr * kr) + i_unit / (kr * kr);
  const std::complex<double> g =
      1.0 / (kr * kr * kr) - i_unit / (kr * kr);
  CHECK(pert.sigma_rabi ==
        doctest::Approx(gamma / 8.0 * std::abs(f_t)).epsilon(1e-10));
  CHECK(pert.pi_rabi ==
        doctest::Approx(gamma / 4.0 * std::abs(g)).epsilon(1e-10));

  // Quoted operating point: 2 pi x 159 kHz within 10%.
  CHECK(pert.peak_rabi == pert.sigma_rabi);
  CHECK(pert.sigma_rabi / (2.0 * M_PI) ==
        doctest::Approx(159e3).epsilon(0.10));
  CHECK(pert.sigma_rabi / (2.0 * M_PI) ==
        doctest::Approx(157.25e3).epsilon(1e-3));
  CHECK(pert.pi_rabi / (2.0 * M_PI) ==
        doctest::Approx(69.74e3).epsilon(1e-3));

  CHECK_THROWS_AS(neighbor_perturbation(0.0), std::invalid_argument);
}

TEST_CASE("opposite circular polarizations stay orthogonal on axis") {
  DipoleSource plus;
  plus.polarization = DipolePolarization::sigma_plus;
  DipoleSource minus = plus;
  minus.polarization = DipolePolarization::sigma_minus;
  const Eigen::Vector3d obs(0.0, 0.0, LatticeGeometry::qubit_spacing);

  const Eigen::Vector3cd e_plus = dipole_field(plus, obs);
  const Eigen::Vector3cd eps_minus = minus.moment_vector() / minus.moment;
  CHECK(std::abs(eps_minus.dot(e_plus)) <= 1e-12 * e_plus.norm());
  CHECK(dipole_field(minus, obs).norm() ==
        doctest::Approx(e_plus.norm()).epsilon(1e-12));
}

TEST_CASE("perturbation pair carries the scattered-field peak on both drives") {
  const PerturbationPair pair = PerturbationPair::from_scattered_dipole();
  CHECK(pair.probe_peak == pair.coupling_peak);
  const double expected = neighbor_perturbation(LatticeGeometry::qubit_spacing)
                              .peak_rabi /
                          (2.0 * M_PI * 6.06e6);
  CHECK(pair.probe_peak == doctest::Approx(expected).epsilon(1e-12));
  CHECK(pair.probe_peak == doctest::Approx(0.02595).epsilon(1e-3));
}

TEST_CASE("zero perturbation changes the neighbor count exactly not at all") {
  const ReadoutProtocol protocol = crosstalk_readout(2.0, 0.5);
  const QubitArrayContext context;
  const PerturbationPair base = PerturbationPair::from_scattered_dipole();

  PerturbationPair zero;
  const CrosstalkDelta off = crosstalk_delta(protocol, context, zero);
  CHECK(off.absolute_change == 0.0);
  CHECK(off.relative_valid);
  CHECK(off.relative_change == 0.0);
  CHECK(off.worst_photons == off.baseline_photons);
  CHECK(off.baseline_photons > 0.0);

  const CrosstalkDelta one = crosstalk_delta(protocol, context, base);
  PerturbationPair ten = base;
  ten.probe_peak *= 10.0;
  ten.coupling_peak *= 10.0;
  const CrosstalkDelta big = crosstalk_delta(protocol, context, ten);

  // The baseline run is identical in every call.
  CHECK(one.baseline_photons == off.baseline_photons);
  CHECK(big.baseline_photons == off.baseline_photons);

  // Monotone in the perturbation amplitude, roughly quadratic.
  CHECK(one.absolute_change > 0.0);
  CHECK(big.absolute_change > one.absolute_change);
  CHECK(big.absolute_change / one.absolute_change > 20.0);
  CHECK(big.absolute_change / one.absolute_change < 500.0);
  CHECK(big.relative_change > one.relative_change);
}

TEST_CASE("scattered-dipole perturbation at the antinode, full sequence") {
  const ReadoutProtocol protocol = crosstalk_readout(6.0, 1.0);
  const QubitArrayContext context;
  const PerturbationPair pair = PerturbationPair::from_scattered_dipole();

  const CrosstalkDelta delta = crosstalk_delta(protocol, context, pair);

  // The unperturbed neighbor is EIT protected down to the nonadiabatic
  // floor; the perturbation itself then dominates the scattering it causes,
  // so the relative change is large even though the absolute count stays
  // far below one photon per sequence.
  CHECK(delta.relative_valid);
  CHECK(delta.baseline_photons > 1e-8);
  CHECK(delta.baseline_photons < 1e-7);
  CHECK(delta.absolute_change > 8e-6);
  CHECK(delta.absolute_change < 3e-5);
  CHECK(delta.relative_change > 200.0);
  CHECK(delta.relative_change < 800.0);
  CHECK(delta.worst_phase == doctest::Approx(M_PI).epsilon(1e-12));
  CHECK(delta.worst_photons > delta.baseline_photons);
}

TEST_CASE("crosstalk rejects malformed inputs") {
  ReadoutProtocol protocol = crosstalk_readout(2.0, 0.5);
  const QubitArrayContext context;
  PerturbationPair pair = PerturbationPair::from_scattered_dipole();

  pair.probe_peak = -1.0;
  CHECK_THROWS_AS(crosstalk_delta(protocol, context, pair),
                  std::invalid_argument);

  pair = PerturbationPair::from_scattered_dipole();
  protocol.wave = StandingWave(18.0, 2.0, 0.0);
  CHECK_THROWS_WITH_AS(crosstalk_delta(protocol, context, pair),
                       doctest::Contains("balanced"), std::invalid_argument);
}
