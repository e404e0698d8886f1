// eit-localizer: command-line front end for the nanoscale-addressing
// toolkit. Subcommands cover the dark-state tables, the spatial readout and
// phase-gate scans, the thermal-density convolution, the scattered-dipole
// neighbor check and the cross-module invariant suite. Every run writes its
// data files plus a JSON manifest into --out; data files are byte-identical
// for any worker count.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 runtime error,
// 4 validation failure. Errors go to stderr as one JSON object.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eitloc/config.hpp"
#include "eitloc/environment.hpp"
#include "eitloc/output.hpp"
#include "eitloc/protocols.hpp"
#include "eitloc/quantum_core.hpp"

namespace {

using namespace eitloc;

struct CommonOptions {
  std::string preset;
  std::string config_path;
  std::string out_dir = ".";
  int jobs = 0;
};

void add_common_options(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--preset", opt.preset,
                  "Named parameter preset (fig5, fig6, fig9, fig10)");
  cmd->add_option("--config", opt.config_path,
                  "Config file applied on top of the preset");
  cmd->add_option("--jobs", opt.jobs,
                  "Worker threads, 0 = all cores "
                  "(EIT_LOCALIZER_THREADS overrides)");
  cmd->add_option("--out", opt.out_dir, "Output directory");
}

// Raised by the validate subcommand after its report files are written.
struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit_error(const char* category, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"]["category"] = category;
  j["error"]["message"] = message;
  std::cerr << j.dump() << "\n";
}

int resolve_jobs(int flag_value) {
  if (const char* env = std::getenv("EIT_LOCALIZER_THREADS")) {
    const std::string raw(env);
    try {
      std::size_t used = 0;
      const int value = std::stoi(raw, &used);
      if (used == raw.size() && value > 0) return value;
    } catch (const std::exception&) {
    }
    throw ConfigError("EIT_LOCALIZER_THREADS: expected a positive integer, "
                      "got '" + raw + "'");
  }
  return flag_value;
}

struct Run {
  SimConfig config;
  int jobs = 0;  // 0 lets the parallel layer pick the core count
  std::filesystem::path out;
  std::chrono::steady_clock::time_point start;
  RunManifest manifest;
};

Run begin_run(const std::string& name, const CommonOptions& opt) {
  Run run;
  const auto preset = opt.preset.empty()
                          ? std::nullopt
                          : std::optional<std::string>(opt.preset);
  const auto path = opt.config_path.empty()
                        ? std::nullopt
                        : std::optional<std::string>(opt.config_path);
  run.config = load_config(preset, path);
  run.jobs = resolve_jobs(opt.jobs);
  run.out = opt.out_dir;
  run.start = std::chrono::steady_clock::now();
  run.manifest.subcommand = name;
  run.manifest.config_hash = config_hash(run.config);
  run.manifest.jobs = resolve_job_count(run.jobs);
  return run;
}

void write_data(Run& run, const std::string& filename,
                std::string_view content) {
  write_file((run.out / filename).string(), content);
  run.manifest.files.push_back(filename);
  std::cout << "wrote " << (run.out / filename).string() << "\n";
}

void finish_run(Run& run) {
  const auto elapsed = std::chrono::steady_clock::now() - run.start;
  run.manifest.wall_time_seconds =
      std::chrono::duration<double>(elapsed).count();
  const std::string name = run.manifest.subcommand + ".manifest.json";
  write_file((run.out / name).string(), run.manifest.render());
  std::cout << "wrote " << (run.out / name).string() << "\n";
}

// ---------------------------------------------------------------------------
// dark-state: analytic mixing tables along the standing wave.

void run_dark_state(const CommonOptions& opt) {
  Run run = begin_run("dark-state", opt);
  const SimConfig& cfg = run.config;
  const double probe = cfg.readout.probe_peak;

  CsvTable table({"x_nm", "omega_c_max_over_gamma", "omega_c_over_gamma",
                  "theta_rad", "dark_pop_b"});
  const long n = std::lround(cfg.grid.half_range / cfg.grid.coarse_step);
  auto scans = nlohmann::ordered_json::array();
  for (const double omega : cfg.sweep) {
    const StandingWave wave(omega, cfg.omega_c_min, cfg.node_position);
    for (long i = -n; i <= n; ++i) {
      const double dx = cfg.grid.half_range * static_cast<double>(i) /
                        static_cast<double>(n);
      const double oc = wave.rabi_at(cfg.node_position + dx);
      const auto angles = mixing_angles(RabiFrequency(probe),
                                        RabiFrequency(oc), Detuning(0.0));
      const double pop_b =
          dark_state_population_b(RabiFrequency(probe), RabiFrequency(oc));
      table.add_row({csv_number(dx * 1e9), csv_number(omega), csv_number(oc),
                     csv_number(angles.theta), csv_number(pop_b)});
    }
    scans.push_back(
        {{"omega_c_max_over_gamma", omega},
         {"transfer_fwhm_estimate_nm",
          transfer_fwhm_estimate(RabiFrequency(probe), RabiFrequency(omega),
                                 constants::lambda_d2) *
              1e9}});
  }
  run.manifest.results["probe_peak_over_gamma"] = probe;
  run.manifest.results["scans"] = scans;
  run.manifest.rows = table.rows.size();
  write_data(run, "dark-state.csv", table.render());
  finish_run(run);
}

// ---------------------------------------------------------------------------
// readout-scan: spatial fluorescence profiles for each sweep amplitude.

void run_readout_scan(const CommonOptions& opt) {
  Run run = begin_run("readout-scan", opt);
  const SimConfig& cfg = run.config;

  CsvTable table(
      {"x_nm", "omega_c_max_over_gamma", "photons", "detected", "note"});
  auto scans = nlohmann::ordered_json::array();
  for (const double omega : cfg.sweep) {
    const auto scan = readout_scan(cfg.readout_protocol(omega), cfg.grid,
                                   run.jobs);
    for (std::size_t i = 0; i < scan.positions.size(); ++i) {
      const auto& point = scan.points[i];
      table.add_row({csv_number(scan.positions[i] * 1e9), csv_number(omega),
                     csv_number(point.photons), csv_number(point.detected),
                     ""});
      run.manifest.step_counts.push_back(point.steps);
    }
    const auto& node_point = scan.points[scan.positions.size() / 2];
    scans.push_back(
        {{"omega_c_max_over_gamma", omega},
         {"fwhm_nm", scan.fwhm * 1e9},
         {"transfer_fwhm_estimate_nm",
          transfer_fwhm_estimate(RabiFrequency(cfg.readout.probe_peak),
                                 RabiFrequency(omega), constants::lambda_d2) *
              1e9},
         {"node_photons", node_point.photons},
         {"node_detected", node_point.detected}});
  }
  run.manifest.results["scans"] = scans;
  run.manifest.rows = table.rows.size();
  write_data(run, "readout-scan.csv", table.render());
  finish_run(run);
}

// ---------------------------------------------------------------------------
// convolve: readout profile on a uniform grid, smeared by the thermal
// ground-state density of the trap.

void run_convolve(const CommonOptions& opt) {
  Run run = begin_run("convolve", opt);
  const SimConfig& cfg = run.config;
  const double omega = cfg.sweep.back();

  SymmetricGridSpec grid;
  grid.half_range = cfg.grid.half_range;
  grid.coarse_step = cfg.convolve_step;
  grid.adaptive = false;
  const auto scan = readout_scan(cfg.readout_protocol(omega), grid, run.jobs);
  const ScanProfile raw = scan.photon_profile();

  const double sigma = ground_state_sigma(cfg.trap());
  const ScanProfile smeared = convolve_profile(raw, sigma);

  CsvTable table({"x_nm", "photons", "photons_convolved"});
  double sum_raw = 0.0;
  double sum_smeared = 0.0;
  for (std::size_t i = 0; i < raw.positions.size(); ++i) {
    table.add_row({csv_number(raw.positions[i] * 1e9),
                   csv_number(raw.values[i]), csv_number(smeared.values[i])});
    run.manifest.step_counts.push_back(scan.points[i].steps);
    sum_raw += raw.values[i];
    sum_smeared += smeared.values[i];
  }

  run.manifest.results["omega_c_max_over_gamma"] = omega;
  run.manifest.results["trap_depth_mk"] = cfg.trap_depth_mk;
  run.manifest.results["sigma_nm"] = sigma * 1e9;
  run.manifest.results["density_fwhm_nm"] = gaussian_fwhm(sigma) * 1e9;
  run.manifest.results["fwhm_raw_nm"] = raw.fwhm * 1e9;
  run.manifest.results["fwhm_convolved_nm"] = smeared.fwhm * 1e9;
  run.manifest.results["sum_photons"] = sum_raw;
  run.manifest.results["sum_photons_convolved"] = sum_smeared;
  run.manifest.results["conservation_rel_error"] =
      sum_raw > 0.0 ? std::abs(sum_smeared - sum_raw) / sum_raw : 0.0;
  run.manifest.rows = table.rows.size();
  write_data(run, "convolve.csv", table.render());
  finish_run(run);
}

// ---------------------------------------------------------------------------
// dipole-check: scattered-field Rabi perturbation at the neighbor site and
// the worst-phase change of the neighbor's photon count.

void run_dipole_check(const CommonOptions& opt) {
  Run run = begin_run("dipole-check", opt);
  const SimConfig& cfg = run.config;
  const double two_pi = 2.0 * constants::pi;

  const auto perturbation =
      neighbor_perturbation(LatticeGeometry::qubit_spacing);
  const auto pair = PerturbationPair::from_scattered_dipole();
  QubitArrayContext context;
  context.target_position = cfg.node_position;
  const auto delta =
      crosstalk_delta(cfg.readout_protocol(cfg.omega_c_max), context, pair);

  nlohmann::ordered_json j;
  j["separation_nm"] = LatticeGeometry::qubit_spacing * 1e9;
  j["rabi_perturbation_hz"] = perturbation.peak_rabi / two_pi;
  j["rabi_perturbation_rad_per_s"] = perturbation.peak_rabi;
  j["sigma_channel_rabi_hz"] = perturbation.sigma_rabi / two_pi;
  j["pi_channel_rabi_hz"] = perturbation.pi_rabi / two_pi;
  j["perturbation_peak_over_gamma"] = pair.probe_peak;
  j["crosstalk_delta"] = delta.relative_change;
  j["crosstalk"] = {{"baseline_photons", delta.baseline_photons},
                    {"worst_photons", delta.worst_photons},
                    {"worst_phase_rad", delta.worst_phase},
                    {"absolute_change_photons", delta.absolute_change},
                    {"relative_change", delta.relative_change},
                    {"relative_valid", delta.relative_valid}};
  write_data(run, "dipole-check.json", j.dump(2) + "\n");

  run.manifest.results["rabi_perturbation_hz"] = perturbation.peak_rabi / two_pi;
  run.manifest.results["crosstalk_delta"] = delta.relative_change;
  finish_run(run);

  std::cout << "scattered-field Rabi perturbation: "
            << csv_number(perturbation.peak_rabi / two_pi * 1e-3)
            << " kHz; worst-phase photon change: absolute "
            << csv_number(delta.absolute_change) << ", relative "
            << csv_number(delta.relative_change) << "\n";
}

// ---------------------------------------------------------------------------
// phase-scan: Stark phase-gate profiles for each sweep amplitude.

void run_phase_scan(const CommonOptions& opt) {
  Run run = begin_run("phase-scan", opt);
  const SimConfig& cfg = run.config;

  auto scans = nlohmann::ordered_json::array();
  for (const double omega : cfg.sweep) {
    const auto scan =
        phase_gate_scan(cfg.phase_gate_protocol(omega), cfg.grid, run.jobs);
    CsvTable table({"x_nm", "phase_rad", "se_prob"});
    for (std::size_t i = 0; i < scan.positions.size(); ++i) {
      const auto& point = scan.points[i];
      table.add_row({csv_number(scan.positions[i] * 1e9),
                     csv_number(point.phase),
                     csv_number(point.se_probability)});
      run.manifest.step_counts.push_back(point.steps);
    }
    const std::string filename =
        cfg.sweep.size() == 1
            ? "phase-scan.csv"
            : "phase-scan-oc" + csv_number(omega) + ".csv";
    run.manifest.rows += table.rows.size();
    write_data(run, filename, table.render());

    const auto& node_point = scan.points[scan.positions.size() / 2];
    scans.push_back({{"omega_c_max_over_gamma", omega},
                     {"file", filename},
                     {"phase_fwhm_nm", scan.phase_fwhm * 1e9},
                     {"node_phase_rad", node_point.phase},
                     {"node_se_prob", node_point.se_probability},
                     {"node_coherence", node_point.coherence}});
  }
  run.manifest.results["scans"] = scans;
  finish_run(run);
}

// ---------------------------------------------------------------------------
// validate: cross-module invariant suite.

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

void report(std::vector<Check>& checks, const std::string& name, bool passed,
            const std::string& detail) {
  checks.push_back({name, passed, detail});
  std::cout << (passed ? "ok   " : "FAIL ") << name << ": " << detail << "\n";
}

std::string num(double v) { return csv_number(v); }

void check_dark_state_identities(std::vector<Check>& checks) {
  const double pairs[][2] = {{0.2, 18.0}, {0.2, 1.0}, {8.0, 208.0},
                             {1.0, 1.0},  {0.5, 0.25}};
  double worst = 0.0;
  for (const auto& p : pairs) {
    const RabiFrequency op(p[0]);
    const RabiFrequency oc(p[1]);
    const auto dark = dark_state(op, oc);
    double norm_sq = 0.0;
    for (const auto& amp : dark) norm_sq += std::norm(amp);
    worst = std::max(worst, std::abs(norm_sq - 1.0));
    worst = std::max(worst, std::abs(dark[2]));
    const double pop = std::norm(dark[1]);
    const double expected = p[0] * p[0] / (p[0] * p[0] + p[1] * p[1]);
    worst = std::max(worst, std::abs(pop - expected));
    const auto dressed =
        dressed_eigensystem(op, oc, Detuning(0.0), Detuning(0.0));
    worst = std::max(worst, std::abs(dressed.lambda_zero));
  }
  report(checks, "dark-state-identities", worst <= 1e-12,
         "max residual " + num(worst) + ", bound 1e-12");
}

void check_rk4_order(std::vector<Check>& checks) {
  LevelScheme scheme;
  scheme.gamma_e = 0.0;
  DriveSnapshot drive;
  drive.omega_p = 1.0;
  const double t_final = 2.0;
  auto rhs = [&](double, const DensityMatrix<4>& rho) {
    return build_rhs_unchecked<4>(scheme, drive, rho);
  };
  auto global_error = [&](int n_steps) {
    DensityMatrix<4> rho = DensityMatrix<4>::Zero();
    rho(lv_b, lv_b) = 1.0;
    const double dt = t_final / n_steps;
    for (int i = 0; i < n_steps; ++i)
      rho = step_rk4<4>(rho, i * dt, dt, rhs);
    const double exact = std::cos(0.5 * t_final) * std::cos(0.5 * t_final);
    return std::abs(rho(lv_b, lv_b).real() - exact);
  };
  const double e1 = global_error(32);
  const double e2 = global_error(64);
  const double order = std::log2(e1 / e2);
  report(checks, "rk4-order", order >= 3.2 && order <= 4.8,
         "measured order " + num(order) + ", expected 4 +- 20%");
}

void check_trajectory_invariants(const SimConfig& cfg,
                                 std::vector<Check>& checks) {
  const auto protocol = cfg.readout_protocol(cfg.omega_c_max);
  const auto& sched = protocol.schedule;
  double worst_trace = 0.0;
  double worst_herm = 0.0;
  double worst_eig = 0.0;
  for (const double dx : {0.0, 2e-9}) {
    const double oc = protocol.wave.rabi_at(cfg.node_position + dx);
    auto drive = [&sched, oc](double t) {
      DriveSnapshot d;
      d.omega_p = sched.probe.value(t);
      d.set_omega_c(oc * sched.coupling.value(t));
      return d;
    };
    RateBound bound{sched.probe.peak, "probe Rabi frequency"};
    bound.consider(oc, "coupling Rabi frequency");
    DensityMatrix<4> rho0 = DensityMatrix<4>::Zero();
    rho0(lv_b, lv_b) = 1.0;
    const auto traj = evolve<4>(rho0, 0.0, sched.coupling.end(),
                                protocol.scheme, drive, bound,
                                protocol.evolve_options);
    for (const auto& rho : traj.states) {
      worst_trace = std::max(worst_trace,
                             std::abs(rho.trace().real() - 1.0) +
                                 std::abs(rho.trace().imag()));
      worst_herm = std::max(
          worst_herm, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
      Eigen::SelfAdjointEigenSolver<DensityMatrix<4>> solver(
          rho, Eigen::EigenvaluesOnly);
      worst_eig = std::min(solver.eigenvalues().minCoeff(), worst_eig);
    }
  }
  report(checks, "trace-preservation", worst_trace <= 1e-9,
         "max trace drift " + num(worst_trace) + ", bound 1e-9");
  report(checks, "hermiticity", worst_herm <= 1e-10,
         "max asymmetry " + num(worst_herm) + ", bound 1e-10");
  report(checks, "positivity", worst_eig >= -1e-8,
         "min eigenvalue " + num(worst_eig) + ", floor -1e-8");
}

void check_detected_scaling(const SimConfig& cfg,
                            std::vector<Check>& checks) {
  const auto point =
      readout_point(cfg.readout_protocol(cfg.omega_c_max), cfg.node_position);
  const double scaling_gap = std::abs(
      point.detected - point.photons * cfg.detection.combined_efficiency);
  const double split_gap =
      std::abs(point.photons - (point.photons_eit + point.photons_repump));
  report(checks, "detected-scaling",
         scaling_gap == 0.0 && split_gap == 0.0,
         "detected = photons x efficiency gap " + num(scaling_gap) +
             ", photon split gap " + num(split_gap) + ", both must be 0");
}

void check_transfer_width_factor(const SimConfig& cfg, int jobs,
                                 std::vector<Check>& checks) {
  for (const double omega : {10.0, 18.0}) {
    auto protocol = cfg.readout_protocol(omega);
    protocol.compose = SequenceComposition::sequential;
    protocol.schedule.repeat_count = 16;
    const double estimate =
        transfer_fwhm_estimate(RabiFrequency(cfg.readout.probe_peak),
                               RabiFrequency(omega), constants::lambda_d2);
    SymmetricGridSpec grid;
    grid.half_range = 3.0 * estimate;
    grid.coarse_step = estimate / 3.0;
    const auto scan = readout_scan(protocol, grid, jobs);
    const double ratio = scan.fwhm / estimate;
    report(checks,
           "transfer-width-factor-oc" + num(omega),
           ratio >= 0.5 && ratio <= 2.0,
           "sequential readout FWHM " + num(scan.fwhm * 1e9) +
               " nm vs estimate " + num(estimate * 1e9) + " nm, ratio " +
               num(ratio) + ", bound [0.5, 2]");
  }
}

// The two Stark routes are compared at the configured operating point; a
// disagreement beyond 5% is a flagged warning, not a failure, because the
// effective route is a lowest-order adiabatic model and loses accuracy once
// the Stark detuning stops being large against the EIT pumping rate
// omega_c^2 / gamma_e. The reference-coherence floor stays a hard check.
void check_stark_modes(const SimConfig& cfg, Run& run,
                       std::vector<Check>& checks) {
  const auto cmp = compare_stark_modes(
      cfg.phase_gate_protocol(cfg.omega_c_max), cfg.node_position);
  run.manifest.results["stark_mode_comparison"] = {
      {"phase_mismatch", cmp.phase_mismatch},
      {"se_mismatch", cmp.se_mismatch},
      {"within_tolerance", cmp.within_tolerance},
      {"effective",
       {{"phase_rad", cmp.effective.phase},
        {"se_prob", cmp.effective.se_probability}}},
      {"explicit",
       {{"phase_rad", cmp.explicit_drive.phase},
        {"se_prob", cmp.explicit_drive.se_probability}}}};
  if (!cmp.within_tolerance) {
    run.manifest.warnings.push_back(
        "explicit and effective Stark routes disagree beyond 5% at the "
        "configured operating point (phase mismatch " +
        num(cmp.phase_mismatch) + ", SE mismatch " + num(cmp.se_mismatch) +
        "); the effective route is a lowest-order adiabatic model");
    std::cout << "warn stark-mode-comparison: phase mismatch "
              << num(cmp.phase_mismatch) << ", SE mismatch "
              << num(cmp.se_mismatch) << " (flagged, bound 0.05)\n";
  } else {
    std::cout << "ok   stark-mode-comparison: phase mismatch "
              << num(cmp.phase_mismatch) << ", SE mismatch "
              << num(cmp.se_mismatch) << ", bound 0.05\n";
  }
  const double floor =
      0.5 * (1.0 - 2.0 * cmp.effective.se_probability) - 1e-12;
  report(checks, "coherence-floor", cmp.effective.coherence >= floor,
         "|rho_br| " + num(cmp.effective.coherence) + " vs floor " +
             num(floor));
}

void check_convolution(const SimConfig& cfg, std::vector<Check>& checks) {
  ScanProfile profile;
  const double sigma_in = 5e-9;
  const double amplitude = 2.5;
  for (long i = -160; i <= 160; ++i) {
    const double x = static_cast<double>(i) * 0.5e-9;
    profile.positions.push_back(x);
    profile.values.push_back(
        amplitude * std::exp(-0.5 * x * x / (sigma_in * sigma_in)));
  }
  const double sigma = ground_state_sigma(cfg.trap());
  const auto smeared = convolve_profile(profile, sigma);
  double sum_in = 0.0;
  double sum_out = 0.0;
  for (const double v : profile.values) sum_in += v;
  for (const double v : smeared.values) sum_out += v;
  const double conservation = std::abs(sum_out - sum_in) / sum_in;
  report(checks, "convolution-conservation", conservation <= 1e-6,
         "relative error " + num(conservation) + ", bound 1e-6");
  const double expected = gaussian_fwhm(
      std::sqrt(sigma_in * sigma_in + sigma * sigma));
  const double gap = std::abs(smeared.fwhm - expected) / expected;
  report(checks, "convolution-width", gap <= 0.05,
         "FWHM " + num(smeared.fwhm * 1e9) + " nm vs quadrature " +
             num(expected * 1e9) + " nm, gap " + num(gap) + ", bound 0.05");
}

void check_crosstalk_monotone(const SimConfig& cfg,
                              std::vector<Check>& checks) {
  const auto protocol = cfg.readout_protocol(cfg.omega_c_max);
  QubitArrayContext context;
  context.target_position = cfg.node_position;
  const auto pair = PerturbationPair::from_scattered_dipole();
  PerturbationPair half = pair;
  half.probe_peak *= 0.5;
  half.coupling_peak *= 0.5;
  PerturbationPair zero = pair;
  zero.probe_peak = 0.0;
  zero.coupling_peak = 0.0;
  const auto d0 = crosstalk_delta(protocol, context, zero);
  const auto dh = crosstalk_delta(protocol, context, half);
  const auto d1 = crosstalk_delta(protocol, context, pair);
  const bool passed = d0.absolute_change == 0.0 &&
                      dh.absolute_change > 0.0 &&
                      d1.absolute_change > dh.absolute_change;
  report(checks, "crosstalk-monotone", passed,
         "absolute change at {0, 0.5, 1} x amplitude: " +
             num(d0.absolute_change) + ", " + num(dh.absolute_change) + ", " +
             num(d1.absolute_change) + ", must increase from exactly 0");
}

void check_scan_determinism(const SimConfig& cfg, std::vector<Check>& checks) {
  auto protocol = cfg.readout_protocol(cfg.omega_c_max);
  SymmetricGridSpec grid;
  grid.half_range = 20e-9;
  grid.coarse_step = 5e-9;
  grid.adaptive = false;
  const auto render = [&](int jobs) {
    const auto scan = readout_scan(protocol, grid, jobs);
    std::string bytes;
    for (std::size_t i = 0; i < scan.positions.size(); ++i)
      bytes += csv_number(scan.positions[i] * 1e9) + "," +
               csv_number(scan.points[i].photons) + "," +
               csv_number(scan.points[i].detected) + "\n";
    return bytes;
  };
  const std::string serial = render(1);
  const std::string threaded = render(3);
  report(checks, "scan-determinism", serial == threaded,
         serial == threaded
             ? "scan bytes identical for 1 and 3 workers"
             : "scan bytes differ between 1 and 3 workers");
}

void run_validate(const CommonOptions& opt) {
  Run run = begin_run("validate", opt);
  const SimConfig& cfg = run.config;

  std::vector<Check> checks;
  check_dark_state_identities(checks);
  check_rk4_order(checks);
  check_trajectory_invariants(cfg, checks);
  check_detected_scaling(cfg, checks);
  check_convolution(cfg, checks);
  check_scan_determinism(cfg, checks);
  check_crosstalk_monotone(cfg, checks);
  check_stark_modes(cfg, run, checks);
  check_transfer_width_factor(cfg, run.jobs, checks);

  bool all_passed = true;
  auto check_array = nlohmann::ordered_json::array();
  for (const auto& check : checks) {
    all_passed = all_passed && check.passed;
    check_array.push_back({{"name", check.name},
                           {"passed", check.passed},
                           {"detail", check.detail}});
  }
  nlohmann::ordered_json j;
  j["passed"] = all_passed;
  j["checks"] = check_array;
  write_data(run, "validate.json", j.dump(2) + "\n");
  run.manifest.results["passed"] = all_passed;
  run.manifest.rows = checks.size();
  finish_run(run);

  if (!all_passed) {
    std::size_t failed = 0;
    for (const auto& check : checks)
      if (!check.passed) ++failed;
    throw ValidationFailure(std::to_string(failed) + " of " +
                            std::to_string(checks.size()) +
                            " invariant checks failed; see validate.json");
  }
  std::cout << "all " << checks.size() << " invariant checks passed\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nanoscale addressing of lattice qubits: dark-state tables, "
               "readout and phase-gate scans, thermal convolution and "
               "scattered-dipole checks"};
  app.set_version_flag("--version", code_version);
  app.require_subcommand(1);

  CommonOptions opt;
  CLI::App* dark = app.add_subcommand("dark-state",
                                      "Dark-state mixing tables along the "
                                      "coupling standing wave");
  CLI::App* readout = app.add_subcommand("readout-scan",
                                         "Spatial fluorescence readout scans");
  CLI::App* convolve = app.add_subcommand("convolve",
                                          "Readout profile smeared by the "
                                          "thermal ground-state density");
  CLI::App* dipole = app.add_subcommand("dipole-check",
                                        "Scattered-dipole perturbation and "
                                        "neighbor crosstalk");
  CLI::App* phase = app.add_subcommand("phase-scan",
                                       "Stark phase-gate scans");
  CLI::App* validate = app.add_subcommand("validate",
                                          "Cross-module invariant suite");
  for (CLI::App* cmd : {dark, readout, convolve, dipole, phase, validate})
    add_common_options(cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("usage", e.what());
    return 2;
  }

  try {
    if (dark->parsed()) run_dark_state(opt);
    if (readout->parsed()) run_readout_scan(opt);
    if (convolve->parsed()) run_convolve(opt);
    if (dipole->parsed()) run_dipole_check(opt);
    if (phase->parsed()) run_phase_scan(opt);
    if (validate->parsed()) run_validate(opt);
    return 0;
  } catch (const ConfigError& e) {
    emit_error("config", e.what());
    return 2;
  } catch (const ValidationFailure& e) {
    emit_error("validation", e.what());
    return 4;
  } catch (const std::exception& e) {
    emit_error("runtime", e.what());
    return 3;
  }
}
