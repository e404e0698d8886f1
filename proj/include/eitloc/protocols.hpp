// Site-resolved addressing protocols built on the standing-wave coupling
// field: fluorescence readout of the qubit at a node, crosstalk onto the
// neighboring lattice sites, and the Stark phase gate. Scans evaluate the
// response as a function of the atom position relative to the node.
#pragma once

#include <array>
#include <limits>
#include <vector>

#include "eitloc/master_equation.hpp"
#include "eitloc/pulses.hpp"
#include "eitloc/scan_profile.hpp"
#include "eitloc/standing_wave.hpp"

namespace eitloc {

// Photon collection: objective solid angle times downstream transmission
// and detector efficiency, folded into one combined number.
struct DetectionModel {
  double numerical_aperture = 0.5;
  double downstream_efficiency = 0.40;
  double combined_efficiency = 0.03;

  void validate() const;
};

// How repeated readout sequences compose. `reset` assumes the atom is
// re-prepared in |0> before each sequence (one sequence is simulated and
// photon numbers scale with repeat_count); `sequential` chains the cycles,
// so population parked in dark ground states stays there.
enum class SequenceComposition { reset, sequential };

// Stark beam treatment: `effective` folds the far-detuned beam into a
// light shift plus scattering admixture; `explicit_drive` keeps the
// oscillating coupling in the Hamiltonian (slow, used for validation).
enum class StarkMode { effective, explicit_drive };

struct QubitArrayContext {
  double target_position = 0.0;  // m, should coincide with a node
  double neighbor_spacing = LatticeGeometry::qubit_spacing;

  std::array<double, 2> neighbor_positions() const {
    return {target_position - neighbor_spacing,
            target_position + neighbor_spacing};
  }
};

struct ReadoutProtocol {
  StandingWave wave;       // balanced pair: omega_min must be 0
  PulseSchedule schedule;  // from readout_schedule()
  DetectionModel detection{};
  LevelScheme scheme{};
  SequenceComposition compose = SequenceComposition::reset;
  EvolveOptions evolve_options{};
};

struct ReadoutPoint {
  double photons_eit = 0.0;     // scattered during the EIT pulses, all repeats
  double photons_repump = 0.0;  // scattered during the repump pulses
  double photons = 0.0;         // total scattered
  double detected = 0.0;        // photons x combined detection efficiency
  long steps = 0;               // integrator steps actually taken
};

// Simulates the readout sequence for an atom at offset x from the node.
// Integrator failures are rethrown with the position attached.
ReadoutPoint readout_point(const ReadoutProtocol& protocol, double x);

struct ReadoutScan {
  std::vector<double> positions;  // m, offsets from the node, ascending
  std::vector<ReadoutPoint> points;
  double fwhm = std::numeric_limits<double>::quiet_NaN();  // m, photon profile

  ScanProfile photon_profile() const;
  ScanProfile detected_profile() const;
};

ReadoutScan readout_scan(const ReadoutProtocol& protocol,
                         const SymmetricGridSpec& grid, int jobs = 0);

struct CrosstalkReport {
  double node_photons = 0.0;
  double neighbor_photons = 0.0;  // worse of the two neighbors
  double ratio = 0.0;             // neighbor / node
  double bandwidth_ratio_sq = 0.0;  // (pulse bandwidth / omega_c_max)^2
};

// Scattered-photon crosstalk onto the neighboring lattice sites, which sit
// at antinodes of the coupling field. bandwidth_ratio_sq is the spectral
// diagnostic that bounds the nonadiabatic excitation of a shelved neighbor.
CrosstalkReport neighbor_crosstalk(const ReadoutProtocol& protocol,
                                   const QubitArrayContext& context);

struct PhaseGateProtocol {
  StandingWave wave;       // imbalanced pair, omega_min > 0 during the gate
  PulseSchedule schedule;  // from phase_gate_schedule()
  LevelScheme scheme{};
  StarkMode mode = StarkMode::effective;
  EvolveOptions evolve_options{};
};

struct PhaseGatePoint {
  double phase = 0.0;  // rad accumulated on the addressed state
  double se_probability = 0.0;  // per atom prepared in the addressed state
  double coherence = 0.0;       // |rho_br| at the end of the gate
  long steps = 0;               // integrator steps actually taken
};

// Runs the gate on the superposition (|0> + |r>)/sqrt(2) where |r> is an
// undriven reference level; the phase is read from the winding of rho_br
// and the spontaneous-emission probability is the scattering integral
// conditioned on the addressed branch.
PhaseGatePoint phase_gate_point(const PhaseGateProtocol& protocol, double x);

struct PhaseGateScan {
  std::vector<double> positions;  // m, offsets from the node, ascending
  std::vector<PhaseGatePoint> points;
  double phase_fwhm = std::numeric_limits<double>::quiet_NaN();  // m

  ScanProfile phase_profile() const;
  ScanProfile se_profile() const;
};

PhaseGateScan phase_gate_scan(const PhaseGateProtocol& protocol,
                              const SymmetricGridSpec& grid, int jobs = 0);

struct StarkModeComparison {
  PhaseGatePoint effective;
  PhaseGatePoint explicit_drive;
  double phase_mismatch = 0.0;  // relative
  double se_mismatch = 0.0;     // relative
  bool within_tolerance = true;
};

// Cross-checks the two Stark routes at one position. A mismatch beyond
// `tolerance` clears within_tolerance; callers should surface that as a
// warning rather than abort.
StarkModeComparison compare_stark_modes(const PhaseGateProtocol& protocol,
                                        double x, double tolerance = 0.05);

struct StarkShift {
  double level_shift = 0.0;       // omega^2 / (2 delta), Gamma_a
  double excited_fraction = 0.0;  // (omega / (2 delta))^2
  bool well_separated = true;     // |delta| >= 10 omega
};

// Adiabatic estimates for a far-detuned beam of peak Rabi amplitude
// `omega_stark` at detuning `delta` (both Gamma_a). Throws std::domain_error
// at zero detuning; well_separated is cleared when the scale separation is
// below a factor of 10 and the estimates lose precision.
StarkShift stark_effective_shift(double omega_stark, double delta);

}  // namespace eitloc
