// Run configuration for the command-line front end.
//
// Config files are flat key-value text: one `key = value` per line, `#`
// comments, optional `[section]` headers that prefix the keys that follow.
// Every dimensioned value carries a mandatory unit suffix (Ga for rates and
// Rabi frequencies, us for times, nm for lengths, mK for temperatures);
// fractions, counts, flags and enumerations are plain. Values are stored in
// the internal unit system (units.hpp) once parsed.
//
// Named presets (fig5, fig6, fig9, fig10) select the standard operating
// points; an explicit config file is applied on top of the chosen preset.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eitloc/environment.hpp"
#include "eitloc/protocols.hpp"

namespace eitloc {

// Rejected key, value, unit or constraint; the message names the offending
// key and the constraint it violated.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  LevelScheme scheme{};

  // Coupling standing wave addressed to the target node.
  double omega_c_max = 18.0;   // Gamma_a, antinode value
  double omega_c_min = 0.0;    // Gamma_a, node floor (must stay 0 for readout)
  double node_position = 0.0;  // m

  // Fluorescence readout sequence.
  ReadoutScheduleParams readout{};
  SequenceComposition compose = SequenceComposition::reset;
  DetectionModel detection{};

  // Stark phase gate.
  PhaseGateScheduleParams gate{};
  double gate_omega_min = 8.0;  // Gamma_a, imbalance floor during the gate
  StarkMode stark_mode = StarkMode::effective;

  // Scan orchestration: the coupling amplitudes swept by readout-scan and
  // phase-scan, and the spatial grid.
  std::vector<double> sweep = {18.0};  // Gamma_a
  SymmetricGridSpec grid{150.0e-9, 5.0e-9};

  // Thermal environment and the uniform grid step used by convolve.
  double trap_depth_mk = 5.0;    // mK
  double convolve_step = 2.0e-9;  // m

  TrapModel trap() const { return TrapModel::from_depth_millikelvin(trap_depth_mk); }

  // Protocol assembled for one sweep value of the coupling amplitude.
  ReadoutProtocol readout_protocol(double omega_c_max_value) const;
  PhaseGateProtocol phase_gate_protocol(double omega_c_max_value) const;
};

// Defaults (fresh SimConfig, repeat count raised to the 16-sequence
// protocol), then the preset if given, then the config file if given, then
// cross-field validation. Throws ConfigError.
SimConfig load_config(const std::optional<std::string>& preset,
                      const std::optional<std::string>& config_path);

SimConfig default_config();

// Overlays one preset; throws ConfigError on an unknown name.
void apply_preset(SimConfig& config, const std::string& name);
std::vector<std::string> preset_names();

// Parses config text and applies each assignment; `origin` names the source
// in error messages. Throws ConfigError on unknown keys, malformed lines,
// missing or wrong unit suffixes, and per-key constraint violations.
void apply_config_text(SimConfig& config, std::string_view text,
                       const std::string& origin);

// Cross-field checks that single assignments cannot see (pulse nesting,
// schedule arithmetic). Throws ConfigError naming the keys involved.
void validate_config(const SimConfig& config);

// Every key in alphabetical order as `key = value` lines, values rendered
// in the same units the parser accepts. Two configs are equivalent exactly
// when their dumps match; the run manifest fingerprints this string. Times
// and lengths are stored in internal units, so their printed values can sit
// an ulp away from what the user wrote; re-parsing a dump is not guaranteed
// to reproduce it bit for bit.
std::string canonical_dump(const SimConfig& config);

// FNV-1a 64-bit fingerprint, and its 16-digit hex form.
std::uint64_t fnv1a64(std::string_view text);
std::string config_hash(const SimConfig& config);

}  // namespace eitloc
