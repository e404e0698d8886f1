// Rotating-frame density-matrix equations for the 4-level scheme
// (|a>, |b>, |c>, |e>) = (F=1 m=-1, m=0, m=+1, F'=0 m=0), optionally
// extended by a fully uncoupled reference level |r> used to read out
// accumulated phases. Rates and Rabi amplitudes are in units of Gamma_a,
// times in 1/Gamma_a.
//
// Coherent part (units hbar = 1):
//   H(b,b) = delta1 - delta2, H(e,e) = delta1,
//   H(a,e) = H(c,e) = -omega_c/2, H(b,e) = -omega_p/2,
// where delta1 is the detuning of the laser driving a,c <-> e and delta2
// that of the probe driving b <-> e. A far-detuned Stark beam on a,c <-> e
// enters either explicitly (stark_coupling, an oscillating complex
// amplitude) or through its adiabatic limit: a diagonal shift -stark_shift
// on a and c plus an excited-state admixture fed into the scattering
// record. The explicit and effective routes agree to O((omega/delta)^2).
//
// Dissipative part: |e> decays at gamma_e with branching fractions into
// a, b, c; optional ground-state relaxation redistributes population
// evenly over the other two ground states; optional pure dephasing damps
// ground-pair coherences. The reference level |r> neither drives nor
// decays; coherences with |r> evolve only through the Hamiltonian.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace eitloc {

enum Level : int { lv_a = 0, lv_b = 1, lv_c = 2, lv_e = 3, lv_r = 4 };

template <int N>
using DensityMatrix = Eigen::Matrix<std::complex<double>, N, N>;

struct LevelScheme {
  double gamma_e = 1.0;  // Gamma_a
  std::array<double, 3> branching = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::array<double, 3> ground_relaxation = {0.0, 0.0, 0.0};
  double ground_dephasing = 0.0;

  void validate() const;
};

// Instantaneous drive values; amplitudes already multiplied by envelopes.
// The coupling drives the a and c channels with independent amplitudes so
// single-channel reductions and polarization-resolved perturbations can be
// expressed; protocols set both to the same standing-wave value.
struct DriveSnapshot {
  double omega_p = 0.0;
  double omega_c_a = 0.0;
  double omega_c_c = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;

  void set_omega_c(double value) { omega_c_a = omega_c_c = value; }
  // Effective Stark route: diagonal shift S(t) = omega_s^2/(2 delta) on a, c
  // and admixture weight (omega_s/(2 delta))^2 for the scattering record.
  double stark_shift = 0.0;
  double stark_admix = 0.0;
  // Explicit Stark route: -(omega_s(t)/2) exp(-i delta t), applied to the
  // a,c <-> e couplings; the sign of the exponent fixes the sign of the
  // induced shift (-omega_s^2/(2 delta) for positive delta, matching the
  // effective route). Zero when the effective route is used.
  std::complex<double> stark_coupling = 0.0;
  // Additive perturbations from a neighboring radiating atom, given as the
  // raw matrix-element additions (so a perturbation of Rabi amplitude eps
  // and phase chi contributes -(eps/2) exp(i chi)). The probe term lands on
  // b <-> e, the coupling term on both a,c <-> e.
  std::complex<double> probe_perturbation = 0.0;
  std::complex<double> coupling_perturbation = 0.0;
};

namespace detail {

template <int N>
void add_hamiltonian_terms(const DriveSnapshot& d, DensityMatrix<N>& h) {
  h(lv_b, lv_b) += d.delta1 - d.delta2;
  h(lv_e, lv_e) += d.delta1;
  const std::complex<double> coupling_a =
      std::complex<double>(-0.5 * d.omega_c_a, 0.0) + d.stark_coupling +
      d.coupling_perturbation;
  const std::complex<double> coupling_c =
      std::complex<double>(-0.5 * d.omega_c_c, 0.0) + d.stark_coupling +
      d.coupling_perturbation;
  const std::complex<double> coupling_b =
      std::complex<double>(-0.5 * d.omega_p, 0.0) + d.probe_perturbation;
  h(lv_a, lv_e) += coupling_a;
  h(lv_c, lv_e) += coupling_c;
  h(lv_b, lv_e) += coupling_b;
  h(lv_e, lv_a) += std::conj(coupling_a);
  h(lv_e, lv_c) += std::conj(coupling_c);
  h(lv_e, lv_b) += std::conj(coupling_b);
  h(lv_a, lv_a) += -d.stark_shift;
  h(lv_c, lv_c) += -d.stark_shift;
}

}  // namespace detail

// dRho/dt = -i[H, rho] + D(rho). The caller guarantees rho is Hermitian;
// use the checked overload below at protocol boundaries.
template <int N>
DensityMatrix<N> build_rhs_unchecked(const LevelScheme& scheme,
                                     const DriveSnapshot& drive,
                                     const DensityMatrix<N>& rho) {
  static_assert(N == 4 || N == 5, "supported dimensions are 4 and 5");

  DensityMatrix<N> h = DensityMatrix<N>::Zero();
  detail::add_hamiltonian_terms<N>(drive, h);

  DensityMatrix<N> drho;
  const std::complex<double> minus_i(0.0, -1.0);
  drho.noalias() = minus_i * (h * rho - rho * h);

  // Spontaneous decay of |e> into the three ground states.
  const double ge = scheme.gamma_e;
  const double ree = rho(lv_e, lv_e).real();
  for (int k = 0; k < 3; ++k) {
    drho(k, k) += ge * scheme.branching[static_cast<size_t>(k)] * ree;
  }
  for (int i = 0; i < N; ++i) {
    drho(i, lv_e) -= 0.5 * ge * rho(i, lv_e);
    drho(lv_e, i) -= 0.5 * ge * rho(lv_e, i);
  }

  // Optional ground-state relaxation, redistributed evenly over the other
  // two ground states so the generator stays trace preserving.
  for (int k = 0; k < 3; ++k) {
    const double gk = scheme.ground_relaxation[static_cast<size_t>(k)];
    if (gk == 0.0) continue;
    const double rkk = rho(k, k).real();
    drho(k, k) -= gk * rkk;
    for (int j = 0; j < 3; ++j) {
      if (j != k) drho(j, j) += 0.5 * gk * rkk;
    }
    for (int i = 0; i < N; ++i) {
      if (i == k) continue;
      drho(i, k) -= 0.5 * gk * rho(i, k);
      drho(k, i) -= 0.5 * gk * rho(k, i);
    }
  }

  // Pure dephasing of ground-pair coherences.
  if (scheme.ground_dephasing != 0.0) {
    const double gd = scheme.ground_dephasing;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i != j) drho(i, j) -= gd * rho(i, j);
      }
    }
  }

  return drho;
}

template <int N>
void require_hermitian(const DensityMatrix<N>& rho, double tol = 1e-10) {
  const double dev = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (!(dev <= tol)) {
    std::ostringstream msg;
    msg << "density matrix is not Hermitian: max |rho - rho^dag| = " << dev;
    throw std::invalid_argument(msg.str());
  }
}

template <int N>
DensityMatrix<N> build_rhs(const LevelScheme& scheme, const DriveSnapshot& drive,
                           const DensityMatrix<N>& rho) {
  require_hermitian<N>(rho);
  return build_rhs_unchecked<N>(scheme, drive, rho);
}

// One classical RK4 step followed by re-symmetrization. `rhs(t, rho)`
// returns the derivative.
template <int N, typename Rhs>
DensityMatrix<N> step_rk4(const DensityMatrix<N>& rho, double t, double dt,
                          Rhs&& rhs) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("RK4 step size must be positive");
  }
  const DensityMatrix<N> k1 = rhs(t, rho);
  const DensityMatrix<N> k2 = rhs(t + 0.5 * dt, (rho + 0.5 * dt * k1).eval());
  const DensityMatrix<N> k3 = rhs(t + 0.5 * dt, (rho + 0.5 * dt * k2).eval());
  const DensityMatrix<N> k4 = rhs(t + dt, (rho + dt * k3).eval());
  DensityMatrix<N> next =
      rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  next = 0.5 * (next + next.adjoint()).eval();
  return next;
}

// Largest dynamical rate together with its origin, used to pick the step
// size and to produce a useful error message when the guard trips.
struct RateBound {
  double value = 0.0;
  const char* name = "none";

  void consider(double rate, const char* rate_name) {
    const double r = std::abs(rate);
    if (r > value) {
      value = r;
      name = rate_name;
    }
  }
};

struct EvolveOptions {
  double dt_factor = 0.05;   // dt = dt_factor / max rate; guard at 0.1
  int max_snapshots = 512;   // decimation for the stored states
  double trace_tol = 1e-6;   // abort threshold on trace drift
  bool check_positivity = true;  // checked at snapshot times
  double positivity_floor = -1e-8;
};

template <int N>
struct Trajectory {
  std::vector<double> times;                // snapshot times
  std::vector<DensityMatrix<N>> states;     // decimated states
  std::vector<double> ee_record;            // per-step rho_ee (+ admixture)
  double step_dt = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;

  const DensityMatrix<N>& final_state() const { return states.back(); }
};

// Integrate from t0 to t1 with a fixed step chosen from the supplied rate
// bound. `drive(t)` returns the DriveSnapshot at time t. Aborts with
// diagnostics on trace drift or positivity violation.
template <int N, typename Drive>
Trajectory<N> evolve(const DensityMatrix<N>& rho0, double t0, double t1,
                     const LevelScheme& scheme, Drive&& drive,
                     RateBound rate_bound, const EvolveOptions& opts = {}) {
  scheme.validate();
  require_hermitian<N>(rho0);
  if (!(t1 >= t0)) {
    throw std::invalid_argument("evolution span must not be negative");
  }

  rate_bound.consider(scheme.gamma_e, "excited-state decay rate");
  if (rate_bound.value <= 0.0) {
    throw std::invalid_argument("no positive dynamical rate supplied");
  }

  auto effective_ee = [](const DriveSnapshot& d, const DensityMatrix<N>& rho) {
    double value = rho(lv_e, lv_e).real();
    if (d.stark_admix != 0.0) {
      value += d.stark_admix *
               (rho(lv_a, lv_a).real() + rho(lv_c, lv_c).real() +
                2.0 * rho(lv_a, lv_c).real());
    }
    return value;
  };

  Trajectory<N> traj;
  traj.t_begin = t0;
  traj.t_end = t1;
  if (t1 == t0) {
    traj.times.push_back(t0);
    traj.states.push_back(rho0);
    traj.ee_record.push_back(effective_ee(drive(t0), rho0));
    return traj;
  }

  const double dt_request = opts.dt_factor / rate_bound.value;
  if (dt_request * rate_bound.value > 0.1 * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "time step " << dt_request << " violates the stability guard "
        << "dt * rate <= 0.1 for the " << rate_bound.name << " ("
        << rate_bound.value << " Gamma_a)";
    throw std::invalid_argument(msg.str());
  }

  const auto n_steps = static_cast<long>(std::ceil((t1 - t0) / dt_request));
  const double dt = (t1 - t0) / static_cast<double>(n_steps);
  const long stride =
      std::max(1L, n_steps / std::max(1, opts.max_snapshots));

  traj.step_dt = dt;
  traj.times.reserve(static_cast<size_t>(n_steps / stride) + 2);
  traj.states.reserve(static_cast<size_t>(n_steps / stride) + 2);
  traj.ee_record.reserve(static_cast<size_t>(n_steps) + 1);

  auto rhs = [&](double t, const DensityMatrix<N>& rho) {
    return build_rhs_unchecked<N>(scheme, drive(t), rho);
  };

  auto check_state = [&](const DensityMatrix<N>& rho, double t) {
    const double trace_drift = std::abs(rho.trace().real() - 1.0) +
                               std::abs(rho.trace().imag());
    if (!(trace_drift <= opts.trace_tol)) {
      std::ostringstream msg;
      msg << "trace drift " << trace_drift << " exceeds " << opts.trace_tol
          << " at t = " << t << " (step " << dt << ")";
      throw std::runtime_error(msg.str());
    }
  };

  auto check_positivity = [&](const DensityMatrix<N>& rho, double t) {
    if (!opts.check_positivity) return;
    Eigen::SelfAdjointEigenSolver<DensityMatrix<N>> solver(rho,
                                                           Eigen::EigenvaluesOnly);
    const double min_eig = solver.eigenvalues().minCoeff();
    if (!(min_eig >= opts.positivity_floor)) {
      std::ostringstream msg;
      msg << "density matrix lost positivity: min eigenvalue " << min_eig
          << " at t = " << t;
      throw std::runtime_error(msg.str());
    }
  };

  DensityMatrix<N> rho = rho0;
  traj.times.push_back(t0);
  traj.states.push_back(rho);
  traj.ee_record.push_back(effective_ee(drive(t0), rho));
  check_positivity(rho, t0);

  for (long i = 0; i < n_steps; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    rho = step_rk4<N>(rho, t, dt, rhs);
    check_state(rho, t + dt);
    traj.ee_record.push_back(effective_ee(drive(t + dt), rho));
    if ((i + 1) % stride == 0 || i + 1 == n_steps) {
      traj.times.push_back(t + dt);
      traj.states.push_back(rho);
      check_positivity(rho, t + dt);
    }
  }
  return traj;
}

// Trapezoidal integral of gamma_e times the recorded effective excited
// population (the explicit rho_ee plus, in the effective Stark route, the
// admixture carried by the record).
template <int N>
double scattered_photons(const Trajectory<N>& traj, double gamma_e) {
  if (traj.ee_record.size() < 2 || traj.step_dt <= 0.0) return 0.0;
  double sum = 0.0;
  for (size_t i = 1; i < traj.ee_record.size(); ++i) {
    sum += 0.5 * (traj.ee_record[i - 1] + traj.ee_record[i]);
  }
  return gamma_e * traj.step_dt * sum;
}

}  // namespace eitloc
