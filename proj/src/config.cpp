#include "eitloc/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "eitloc/pulses.hpp"

namespace eitloc {

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& message,
                       const std::string& where) {
  throw ConfigError(key + ": " + message + where);
}

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

// Leading number of `raw`; returns the number of characters consumed, zero
// when no number is present.
std::size_t number_prefix(const std::string& raw, double& value) {
  const auto [ptr, ec] =
      std::from_chars(raw.data(), raw.data() + raw.size(), value);
  if (ec != std::errc{}) return 0;
  return static_cast<std::size_t>(ptr - raw.data());
}

double parse_plain(const std::string& key, const std::string& raw,
                   const std::string& where) {
  double value = 0.0;
  const std::size_t used = number_prefix(raw, value);
  if (used == 0 || used != raw.size())
    fail(key, "expected a plain (dimensionless) number, got '" + raw + "'",
         where);
  return value;
}

// Number with a mandatory unit suffix, e.g. "6us" or "6 us".
double parse_unit(const std::string& key, const std::string& raw,
                  const std::string& unit, const std::string& where) {
  double value = 0.0;
  const std::size_t used = number_prefix(raw, value);
  if (used == 0)
    fail(key, "expected a number with unit '" + unit + "', got '" + raw + "'",
         where);
  const std::string suffix = trim(raw.substr(used));
  if (suffix.empty())
    fail(key, "missing required unit suffix '" + unit + "' (got '" + raw + "')",
         where);
  if (suffix != unit)
    fail(key, "expected unit '" + unit + "', got '" + suffix + "'", where);
  return value;
}

long parse_integer(const std::string& key, const std::string& raw,
                   const std::string& where) {
  long value = 0;
  const auto [ptr, ec] =
      std::from_chars(raw.data(), raw.data() + raw.size(), value);
  if (ec != std::errc{} || ptr != raw.data() + raw.size())
    fail(key, "expected an integer, got '" + raw + "'", where);
  return value;
}

bool parse_bool(const std::string& key, const std::string& raw,
                const std::string& where) {
  if (raw == "true") return true;
  if (raw == "false") return false;
  fail(key, "expected 'true' or 'false', got '" + raw + "'", where);
}

void require_finite(const std::string& key, double v, const std::string& unit,
                    const std::string& where) {
  if (!std::isfinite(v)) fail(key, "must be finite (unit " + unit + ")", where);
}

double positive_unit(const std::string& key, const std::string& raw,
                     const std::string& unit, const std::string& where) {
  const double v = parse_unit(key, raw, unit, where);
  require_finite(key, v, unit, where);
  if (!(v > 0.0))
    fail(key, "must be positive (got '" + raw + "')", where);
  return v;
}

double nonnegative_unit(const std::string& key, const std::string& raw,
                        const std::string& unit, const std::string& where) {
  const double v = parse_unit(key, raw, unit, where);
  require_finite(key, v, unit, where);
  if (!(v >= 0.0))
    fail(key, "must be non-negative (got '" + raw + "')", where);
  return v;
}

std::vector<std::string> split(const std::string& raw, char delimiter) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t stop = raw.find(delimiter, start);
    if (stop == std::string::npos) {
      parts.push_back(trim(raw.substr(start)));
      return parts;
    }
    parts.push_back(trim(raw.substr(start, stop - start)));
    start = stop + 1;
  }
}

void apply_assignment(SimConfig& c, const std::string& key,
                      const std::string& raw, const std::string& where) {
  if (key == "scheme.gamma_e") {
    c.scheme.gamma_e = positive_unit(key, raw, "Ga", where);
  } else if (key == "scheme.ground_dephasing") {
    c.scheme.ground_dephasing = nonnegative_unit(key, raw, "Ga", where);
  } else if (key == "wave.omega_max") {
    c.omega_c_max = positive_unit(key, raw, "Ga", where);
  } else if (key == "wave.omega_min") {
    c.omega_c_min = nonnegative_unit(key, raw, "Ga", where);
  } else if (key == "wave.node") {
    const double nm = parse_unit(key, raw, "nm", where);
    require_finite(key, nm, "nm", where);
    c.node_position = nm * 1e-9;
  } else if (key == "probe.peak") {
    c.readout.probe_peak = positive_unit(key, raw, "Ga", where);
  } else if (key == "probe.duration") {
    c.readout.probe_duration =
        microseconds(positive_unit(key, raw, "us", where));
  } else if (key == "probe.rise") {
    c.readout.t_rise = microseconds(positive_unit(key, raw, "us", where));
  } else if (key == "readout.repeats") {
    const long n = parse_integer(key, raw, where);
    if (n < 1) fail(key, "must be at least 1 (got '" + raw + "')", where);
    c.readout.repeats = static_cast<int>(n);
  } else if (key == "readout.compose") {
    if (raw == "reset")
      c.compose = SequenceComposition::reset;
    else if (raw == "sequential")
      c.compose = SequenceComposition::sequential;
    else
      fail(key, "expected 'reset' or 'sequential', got '" + raw + "'", where);
  } else if (key == "repump.enabled") {
    c.readout.repump_enabled = parse_bool(key, raw, where);
  } else if (key == "repump.duration") {
    c.readout.repump_duration =
        microseconds(nonnegative_unit(key, raw, "us", where));
  } else if (key == "repump.min_fraction") {
    const double f = parse_plain(key, raw, where);
    if (!(f >= 0.0) || !(f <= 1.0))
      fail(key, "must lie in [0, 1] (got '" + raw + "')", where);
    c.readout.repump_min_fraction = f;
  } else if (key == "detection.efficiency") {
    const double f = parse_plain(key, raw, where);
    if (!(f > 0.0) || !(f <= 1.0))
      fail(key, "must lie in (0, 1] (got '" + raw + "')", where);
    c.detection.combined_efficiency = f;
  } else if (key == "gate.probe_peak") {
    c.gate.probe_peak = positive_unit(key, raw, "Ga", where);
  } else if (key == "gate.probe_duration") {
    c.gate.probe_duration = microseconds(positive_unit(key, raw, "us", where));
  } else if (key == "gate.coupling_duration") {
    c.gate.coupling_duration =
        microseconds(positive_unit(key, raw, "us", where));
  } else if (key == "gate.rise") {
    c.gate.t_rise = microseconds(positive_unit(key, raw, "us", where));
  } else if (key == "gate.omega_min") {
    c.gate_omega_min = nonnegative_unit(key, raw, "Ga", where);
  } else if (key == "stark.peak") {
    c.gate.stark_peak = nonnegative_unit(key, raw, "Ga", where);
  } else if (key == "stark.duration") {
    c.gate.stark_duration =
        microseconds(nonnegative_unit(key, raw, "us", where));
  } else if (key == "stark.detuning") {
    const double d = parse_unit(key, raw, "Ga", where);
    require_finite(key, d, "Ga", where);
    if (d == 0.0) fail(key, "must be nonzero", where);
    c.gate.stark_detuning = d;
  } else if (key == "stark.mode") {
    if (raw == "effective")
      c.stark_mode = StarkMode::effective;
    else if (raw == "explicit")
      c.stark_mode = StarkMode::explicit_drive;
    else
      fail(key, "expected 'effective' or 'explicit', got '" + raw + "'", where);
  } else if (key == "scan.omega_values") {
    std::vector<double> values;
    for (const auto& token : split(raw, ','))
      values.push_back(positive_unit(key, token, "Ga", where));
    if (values.empty()) fail(key, "needs at least one value", where);
    c.sweep = std::move(values);
  } else if (key == "grid.half_range") {
    c.grid.half_range = positive_unit(key, raw, "nm", where) * 1e-9;
  } else if (key == "grid.step") {
    c.grid.coarse_step = positive_unit(key, raw, "nm", where) * 1e-9;
  } else if (key == "grid.adaptive") {
    c.grid.adaptive = parse_bool(key, raw, where);
  } else if (key == "grid.refine_divisor") {
    const double d = parse_plain(key, raw, where);
    if (!(d >= 1.0)) fail(key, "must be at least 1 (got '" + raw + "')", where);
    c.grid.refine_divisor = d;
  } else if (key == "grid.max_rounds") {
    const long n = parse_integer(key, raw, where);
    if (n < 0) fail(key, "must be non-negative (got '" + raw + "')", where);
    c.grid.max_rounds = static_cast<int>(n);
  } else if (key == "trap.depth") {
    c.trap_depth_mk = positive_unit(key, raw, "mK", where);
  } else if (key == "convolve.step") {
    c.convolve_step = positive_unit(key, raw, "nm", where) * 1e-9;
  } else {
    fail(key, "unknown configuration key", where);
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_us(double internal_time) {
  return fmt(internal_to_seconds(internal_time) * 1e6) + "us";
}

std::string fmt_nm(double meters) { return fmt(meters * 1e9) + "nm"; }

constexpr std::array<std::pair<const char*, const char*>, 4> kPresets = {{
    {"fig5",
     "scan.omega_values = 1Ga, 2Ga, 3Ga, 4Ga, 5Ga, 6Ga, 7Ga, 8Ga, 9Ga, "
     "10Ga, 11Ga, 12Ga, 13Ga, 14Ga, 15Ga, 16Ga, 17Ga, 18Ga\n"},
    {"fig6", "scan.omega_values = 18Ga\n"},
    {"fig9",
     "scan.omega_values = 16Ga, 128Ga, 208Ga\n"
     "grid.half_range = 190nm\n"
     "grid.step = 10nm\n"},
    {"fig10",
     "scan.omega_values = 208Ga\n"
     "wave.omega_max = 208Ga\n"
     "grid.half_range = 190nm\n"
     "grid.step = 10nm\n"},
}};

}  // namespace

SimConfig default_config() {
  SimConfig config;
  config.readout.repeats = 16;
  return config;
}

void apply_preset(SimConfig& config, const std::string& name) {
  for (const auto& [preset_name, text] : kPresets) {
    if (name == preset_name) {
      apply_config_text(config, text, "preset " + name);
      return;
    }
  }
  std::string known;
  for (const auto& [preset_name, text] : kPresets) {
    (void)text;
    if (!known.empty()) known += ", ";
    known += preset_name;
  }
  throw ConfigError("unknown preset '" + name + "' (known presets: " + known +
                    ")");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : kPresets) {
    (void)text;
    names.emplace_back(name);
  }
  return names;
}

void apply_config_text(SimConfig& config, std::string_view text,
                       const std::string& origin) {
  std::string section;
  int line_number = 0;
  std::istringstream stream{std::string(text)};
  std::string line;
  while (std::getline(stream, line)) {
    ++line_number;
    const std::string where =
        " [" + origin + " line " + std::to_string(line_number) + "]";
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;

    if (stripped.front() == '[') {
      if (stripped.back() != ']')
        throw ConfigError("malformed section header '" + stripped + "'" +
                          where);
      section = trim(stripped.substr(1, stripped.size() - 2));
      continue;
    }

    const auto equals = stripped.find('=');
    if (equals == std::string::npos)
      throw ConfigError("expected 'key = value', got '" + stripped + "'" +
                        where);
    std::string key = trim(stripped.substr(0, equals));
    const std::string value = trim(stripped.substr(equals + 1));
    if (key.empty())
      throw ConfigError("missing key before '='" + where);
    if (key.find('.') == std::string::npos && !section.empty())
      key = section + "." + key;
    apply_assignment(config, key, value, where);
  }
}

void validate_config(const SimConfig& config) {
  try {
    config.scheme.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("scheme.*: ") + e.what());
  }
  try {
    config.detection.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("detection.efficiency: ") + e.what());
  }
  try {
    config.grid.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("grid.*: ") + e.what());
  }
  if (config.omega_c_min != 0.0)
    throw ConfigError(
        "wave.omega_min: must be 0 for the readout protocols (the repump "
        "imbalance is set by repump.min_fraction)");
  try {
    readout_schedule(config.readout);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("readout schedule (probe.*, repump.*): ") +
                      e.what());
  }
  try {
    phase_gate_schedule(config.gate);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("gate schedule (gate.*, stark.*): ") +
                      e.what());
  }
  try {
    config.trap().validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("trap.depth: ") + e.what());
  }
}

SimConfig load_config(const std::optional<std::string>& preset,
                      const std::optional<std::string>& config_path) {
  SimConfig config = default_config();
  if (preset) apply_preset(config, *preset);
  if (config_path) {
    std::ifstream file(*config_path);
    if (!file)
      throw ConfigError("cannot read config file '" + *config_path + "'");
    std::ostringstream text;
    text << file.rdbuf();
    apply_config_text(config, text.str(), *config_path);
  }
  validate_config(config);
  return config;
}

ReadoutProtocol SimConfig::readout_protocol(double omega_c_max_value) const {
  ReadoutProtocol protocol;
  protocol.wave =
      StandingWave(omega_c_max_value, omega_c_min, node_position);
  protocol.schedule = readout_schedule(readout);
  protocol.detection = detection;
  protocol.scheme = scheme;
  protocol.compose = compose;
  return protocol;
}

PhaseGateProtocol SimConfig::phase_gate_protocol(
    double omega_c_max_value) const {
  PhaseGateProtocol protocol;
  protocol.wave =
      StandingWave(omega_c_max_value, gate_omega_min, node_position);
  protocol.schedule = phase_gate_schedule(gate);
  protocol.scheme = scheme;
  protocol.mode = stark_mode;
  return protocol;
}

std::string canonical_dump(const SimConfig& c) {
  std::ostringstream out;
  out << "convolve.step = " << fmt_nm(c.convolve_step) << '\n'
      << "detection.efficiency = " << fmt(c.detection.combined_efficiency)
      << '\n'
      << "gate.coupling_duration = " << fmt_us(c.gate.coupling_duration)
      << '\n'
      << "gate.omega_min = " << fmt(c.gate_omega_min) << "Ga\n"
      << "gate.probe_duration = " << fmt_us(c.gate.probe_duration) << '\n'
      << "gate.probe_peak = " << fmt(c.gate.probe_peak) << "Ga\n"
      << "gate.rise = " << fmt_us(c.gate.t_rise) << '\n'
      << "grid.adaptive = " << (c.grid.adaptive ? "true" : "false") << '\n'
      << "grid.half_range = " << fmt_nm(c.grid.half_range) << '\n'
      << "grid.max_rounds = " << c.grid.max_rounds << '\n'
      << "grid.refine_divisor = " << fmt(c.grid.refine_divisor) << '\n'
      << "grid.step = " << fmt_nm(c.grid.coarse_step) << '\n'
      << "probe.duration = " << fmt_us(c.readout.probe_duration) << '\n'
      << "probe.peak = " << fmt(c.readout.probe_peak) << "Ga\n"
      << "probe.rise = " << fmt_us(c.readout.t_rise) << '\n'
      << "readout.compose = "
      << (c.compose == SequenceComposition::reset ? "reset" : "sequential")
      << '\n'
      << "readout.repeats = " << c.readout.repeats << '\n'
      << "repump.duration = " << fmt_us(c.readout.repump_duration) << '\n'
      << "repump.enabled = " << (c.readout.repump_enabled ? "true" : "false")
      << '\n'
      << "repump.min_fraction = " << fmt(c.readout.repump_min_fraction)
      << '\n';
  out << "scan.omega_values = ";
  for (std::size_t i = 0; i < c.sweep.size(); ++i) {
    if (i > 0) out << ", ";
    out << fmt(c.sweep[i]) << "Ga";
  }
  out << '\n';
  out << "scheme.gamma_e = " << fmt(c.scheme.gamma_e) << "Ga\n"
      << "scheme.ground_dephasing = " << fmt(c.scheme.ground_dephasing)
      << "Ga\n"
      << "stark.detuning = " << fmt(c.gate.stark_detuning) << "Ga\n"
      << "stark.duration = " << fmt_us(c.gate.stark_duration) << '\n'
      << "stark.mode = "
      << (c.stark_mode == StarkMode::effective ? "effective" : "explicit")
      << '\n'
      << "stark.peak = " << fmt(c.gate.stark_peak) << "Ga\n"
      << "trap.depth = " << fmt(c.trap_depth_mk) << "mK\n"
      << "wave.node = " << fmt_nm(c.node_position) << '\n'
      << "wave.omega_max = " << fmt(c.omega_c_max) << "Ga\n"
      << "wave.omega_min = " << fmt(c.omega_c_min) << "Ga\n";
  return out.str();
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (const char ch : text) {
    hash ^= static_cast<unsigned char>(ch);
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string config_hash(const SimConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_dump(config))));
  return buf;
}

}  // namespace eitloc
