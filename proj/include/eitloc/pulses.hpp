// Pulse envelopes and the counter-intuitive schedules used by the readout
// and phase-gate protocols. All times are in units of 1/Gamma_a and all
// amplitudes in units of Gamma_a (see units.hpp for conversions).
#pragma once

#include <cmath>
#include <optional>

#include "eitloc/units.hpp"

namespace eitloc {

// sin^2 ramp up, flat hold, sin^2 ramp down; exactly zero outside
// [t_start, t_start + t_rise + t_hold + t_fall]. Continuous and once
// differentiable everywhere for positive ramp times.
struct PulseEnvelope {
  double t_start = 0.0;
  double t_rise = 0.0;
  double t_hold = 0.0;
  double t_fall = 0.0;
  double peak = 0.0;

  PulseEnvelope() = default;
  PulseEnvelope(double start, double rise, double hold, double fall,
                double peak_value);

  double duration() const { return t_rise + t_hold + t_fall; }
  double end() const { return t_start + duration(); }
  double hold_start() const { return t_start + t_rise; }
  double hold_end() const { return t_start + t_rise + t_hold; }

  // Spectral width of the pulse, pi over its total duration.
  double bandwidth() const;

  double value(double t) const {
    const double u = t - t_start;
    if (u <= 0.0) return 0.0;
    if (u < t_rise) {
      const double s = std::sin(0.5 * M_PI * u / t_rise);
      return peak * s * s;
    }
    const double d = duration();
    if (u >= d) return 0.0;
    if (u <= t_rise + t_hold) return peak;
    const double s = std::sin(0.5 * M_PI * (d - u) / t_fall);
    return peak * s * s;
  }
};

// Counter-intuitive pulse pair (coupling envelops the probe), an optional
// Stark pulse confined to the joint flat-top window, and an optional
// coupling-only repump pulse that follows the EIT pulse. The sequence can
// repeat; cycle_time is the start-to-start period.
struct PulseSchedule {
  PulseEnvelope probe;
  PulseEnvelope coupling;
  std::optional<PulseEnvelope> stark;
  std::optional<PulseEnvelope> repump;
  double repump_min_fraction = 0.0;  // standing-wave floor during repump
  double stark_detuning = 0.0;       // units of Gamma_a
  int repeat_count = 1;
  double cycle_time = 0.0;

  // Bandwidth of the transfer pulse (the probe).
  double bandwidth() const { return probe.bandwidth(); }

  // Probe-on time summed over repeats; the figure of merit quoted for the
  // readout protocol (repeats x probe duration).
  double protocol_probe_time() const {
    return repeat_count * probe.duration();
  }

  double total_duration() const { return repeat_count * cycle_time; }
};

struct ReadoutScheduleParams {
  double probe_peak = 0.2;                        // Gamma_a
  double probe_duration = microseconds(6.0);      // 1/Gamma_a
  double t_rise = microseconds(1.0);              // 1/Gamma_a
  int repeats = 1;
  bool repump_enabled = true;
  double repump_duration = 0.0;  // 0 means same as probe_duration
  double repump_min_fraction = 0.1;
};

// EIT pulse (coupling envelops probe) followed by a coupling-only repump
// pulse with an intensity-imbalanced beam pair. Throws std::invalid_argument
// when the requested durations cannot honor the ordering.
PulseSchedule readout_schedule(const ReadoutScheduleParams& params);

struct PhaseGateScheduleParams {
  double probe_peak = 8.0;                          // Gamma_a
  double probe_duration = microseconds(25.0);       // 1/Gamma_a
  double coupling_duration = microseconds(35.0);    // 1/Gamma_a
  double t_rise = microseconds(5.0);                // 1/Gamma_a
  double stark_peak = 1.6;                          // Gamma_a
  double stark_duration = microseconds(15.0);       // 0 disables the pulse
  double stark_detuning = 200.0;                    // Gamma_a
};

// Coupling, then probe, then Stark pulse, symmetric turn-off; the Stark
// support sits inside the window where probe and coupling are both at peak.
// Throws std::invalid_argument on a nesting violation.
PulseSchedule phase_gate_schedule(const PhaseGateScheduleParams& params);

// Flat-top estimate of the accumulated differential phase, omega^2/(2 delta)
// times the full pulse duration, before transfer-fraction and ramp weighting.
double nominal_stark_phase(double stark_peak, double stark_detuning,
                           double stark_duration);

}  // namespace eitloc
