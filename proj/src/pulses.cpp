#include "eitloc/pulses.hpp"

#include <stdexcept>
#include <string>

#include "eitloc/units.hpp"

namespace eitloc {

PulseEnvelope::PulseEnvelope(double start, double rise, double hold,
                             double fall, double peak_value)
    : t_start(start), t_rise(rise), t_hold(hold), t_fall(fall),
      peak(peak_value) {
  if (!(t_rise > 0.0) || !(t_fall > 0.0)) {
    throw std::invalid_argument("pulse ramp times must be positive");
  }
  if (t_hold < 0.0) {
    throw std::invalid_argument("pulse hold time must be non-negative");
  }
  if (!(peak >= 0.0)) {
    throw std::invalid_argument("pulse peak must be non-negative");
  }
}

double PulseEnvelope::bandwidth() const { return M_PI / duration(); }

namespace {

void check_counter_intuitive(const PulseSchedule& s) {
  if (!(s.coupling.t_start < s.probe.t_start)) {
    throw std::invalid_argument(
        "schedule violates counter-intuitive ordering: coupling must turn on "
        "before the probe");
  }
  if (!(s.coupling.end() > s.probe.end())) {
    throw std::invalid_argument(
        "schedule violates counter-intuitive ordering: coupling must turn off "
        "after the probe");
  }
  if (s.probe.t_start < s.coupling.hold_start() ||
      s.probe.end() > s.coupling.hold_end()) {
    throw std::invalid_argument(
        "schedule leaves the coupling below peak while the probe is on");
  }
}

}  // namespace

PulseSchedule readout_schedule(const ReadoutScheduleParams& params) {
  ReadoutScheduleParams p = params;
  if (p.probe_duration <= 0.0 || p.t_rise <= 0.0) {
    throw std::invalid_argument("probe duration and ramp time must be positive");
  }
  if (p.repump_duration <= 0.0) p.repump_duration = p.probe_duration;
  if (p.repeats < 1) {
    throw std::invalid_argument("repeat count must be at least 1");
  }
  if (p.probe_duration <= 2.0 * p.t_rise) {
    throw std::invalid_argument(
        "probe duration must exceed twice the ramp time");
  }
  if (p.repump_enabled && p.repump_duration <= 2.0 * p.t_rise) {
    throw std::invalid_argument(
        "repump duration must exceed twice the ramp time");
  }
  if (p.repump_min_fraction < 0.0 || p.repump_min_fraction > 1.0) {
    throw std::invalid_argument(
        "repump imbalance fraction must lie in [0, 1]");
  }

  PulseSchedule s;
  const double tr = p.t_rise;
  // Coupling envelops the probe by one ramp time on each side and is at
  // peak throughout the probe support.
  s.coupling = PulseEnvelope(0.0, tr, p.probe_duration, tr, 1.0);
  s.probe = PulseEnvelope(tr, tr, p.probe_duration - 2.0 * tr, tr,
                          p.probe_peak);
  if (p.repump_enabled) {
    s.repump = PulseEnvelope(s.coupling.end(), tr,
                             p.repump_duration - 2.0 * tr, tr, 1.0);
    s.repump_min_fraction = p.repump_min_fraction;
    s.cycle_time = s.repump->end();
  } else {
    s.cycle_time = s.coupling.end();
  }
  s.repeat_count = p.repeats;
  check_counter_intuitive(s);
  return s;
}

PulseSchedule phase_gate_schedule(const PhaseGateScheduleParams& params) {
  const PhaseGateScheduleParams& p = params;
  if (p.probe_duration <= 0.0 || p.coupling_duration <= 0.0 ||
      p.t_rise <= 0.0) {
    throw std::invalid_argument("pulse durations and ramp time must be positive");
  }
  if (p.stark_duration < 0.0) {
    throw std::invalid_argument("Stark pulse duration must be non-negative");
  }

  const double tr = p.t_rise;
  if (p.coupling_duration <= p.probe_duration) {
    throw std::invalid_argument(
        "coupling pulse must be longer than the probe pulse");
  }
  if (p.probe_duration <= 2.0 * tr) {
    throw std::invalid_argument(
        "probe duration must exceed twice the ramp time");
  }
  if (p.coupling_duration <= 2.0 * tr) {
    throw std::invalid_argument(
        "coupling duration must exceed twice the ramp time");
  }

  PulseSchedule s;
  s.coupling = PulseEnvelope(0.0, tr, p.coupling_duration - 2.0 * tr, tr, 1.0);
  const double probe_start =
      0.5 * (p.coupling_duration - p.probe_duration);  // symmetric turn-off
  s.probe = PulseEnvelope(probe_start, tr, p.probe_duration - 2.0 * tr, tr,
                          p.probe_peak);
  if (p.stark_duration > 0.0) {
    if (p.stark_duration <= 2.0 * tr) {
      throw std::invalid_argument(
          "Stark pulse duration must exceed twice the ramp time");
    }
    const double stark_start = s.probe.hold_start();
    PulseEnvelope stark(stark_start, tr, p.stark_duration - 2.0 * tr, tr,
                        p.stark_peak);
    const double peak_start =
        std::max(s.probe.hold_start(), s.coupling.hold_start());
    const double peak_end = std::min(s.probe.hold_end(), s.coupling.hold_end());
    const double slack = 1e-9 * s.coupling.duration();  // rounding headroom
    if (stark.t_start < peak_start - slack || stark.end() > peak_end + slack) {
      throw std::invalid_argument(
          "Stark pulse must fit inside the joint probe/coupling flat top "
          "(support [" + std::to_string(stark.t_start) + ", " +
          std::to_string(stark.end()) + "] vs flat top [" +
          std::to_string(peak_start) + ", " + std::to_string(peak_end) + "])");
    }
    s.stark = stark;
    s.stark_detuning = p.stark_detuning;
  }
  s.repeat_count = 1;
  s.cycle_time = s.coupling.end();
  check_counter_intuitive(s);
  return s;
}

double nominal_stark_phase(double stark_peak, double stark_detuning,
                           double stark_duration) {
  if (stark_detuning == 0.0) {
    throw std::domain_error("Stark detuning must be nonzero");
  }
  return stark_peak * stark_peak / (2.0 * stark_detuning) * stark_duration;
}

}  // namespace eitloc
