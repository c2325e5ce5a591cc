#include "harvester/actuation.hpp"

#include <algorithm>
#include <cmath>

#include "harvester/calibration.hpp"
#include "harvester/errors.hpp"

namespace harvester {

using namespace calibration;

double pitch_to_stroke(double theta) { return kStrokePerDeg * theta + kStrokeAtZeroDeg; }

double stroke_to_pitch(double l_theta_c) { return (l_theta_c - kStrokeAtZeroDeg) / kStrokePerDeg; }

StrokeCommand pitch_to_stroke_clamped(double theta, const StrokeRange& range) {
  const double raw = pitch_to_stroke(theta);
  const double clamped = std::clamp(raw, range.min, range.max);
  return {clamped, clamped != raw};
}

double pot_to_height(double l_p) {
  if (!(l_p >= kPotMinMm - kRangeSlack && l_p <= kPotMaxMm + kRangeSlack)) {
    throw OutOfRange("potentiometer length " + std::to_string(l_p) + " mm outside [0, 100]");
  }
  return kHeightPerPotMm * l_p + kHeightAtZeroPot;
}

double height_to_pot(double h_p) { return (h_p - kHeightAtZeroPot) / kHeightPerPotMm; }

PidController PidController::make(const PidGains& gains, const Interval& output_limits, double time_base) {
  PidController c;
  c.gains = gains;
  c.output_limits = output_limits;
  c.time_base = time_base;
  if (gains.ki != 0) {
    const double a = output_limits.lo / gains.ki;
    const double b = output_limits.hi / gains.ki;
    c.integral_limits = {std::min(a, b), std::max(a, b)};
  }
  return c;
}

double pid_step(PidController& ctrl, double error, double dt) {
  if (!(dt > 0)) throw OutOfRange("pid_step: dt must be > 0");
  if (ctrl.gains.ki != 0) {
    ctrl.integral = ctrl.integral_limits.clamp(ctrl.integral + error * dt / ctrl.time_base);
  }
  const double derivative = ctrl.prev_error ? (error - *ctrl.prev_error) / dt * ctrl.time_base : 0.0;
  ctrl.prev_error = error;
  const double out = ctrl.gains.kp * error + ctrl.gains.ki * ctrl.integral + ctrl.gains.kd * derivative;
  return ctrl.output_limits.clamp(out);
}

void CylinderState::validate() const {
  if (!(stroke_min <= stroke_max)) throw OutOfRange("cylinder stroke_min > stroke_max");
  if (!(max_rate >= 0)) throw OutOfRange("cylinder max_rate must be >= 0");
  if (!(stroke >= stroke_min && stroke <= stroke_max)) throw OutOfEnvelope("cylinder stroke outside its limits");
}

CylinderStep cylinder_step(const CylinderState& cyl, double commanded_rate, double dt) {
  if (!(dt > 0)) throw OutOfRange("cylinder_step: dt must be > 0");
  CylinderStep out;
  out.state = cyl;
  const double rate = std::clamp(commanded_rate, -cyl.max_rate, cyl.max_rate);
  out.rate_saturated = rate != commanded_rate;
  const double target = cyl.stroke + rate * dt;
  out.state.stroke = std::clamp(target, cyl.stroke_min, cyl.stroke_max);
  out.stroke_saturated = out.state.stroke != target;
  out.applied_rate = (out.state.stroke - cyl.stroke) / dt;
  return out;
}

std::string to_string(CommandMode m) { return m == CommandMode::rate ? "rate" : "position"; }

std::string to_string(GainTimeBase b) { return b == GainTimeBase::per_sample ? "per_sample" : "per_second"; }

CommandMode command_mode_from_string(const std::string& s) {
  if (s == "rate") return CommandMode::rate;
  if (s == "position") return CommandMode::position;
  throw UnknownKind("unknown command mode '" + s + "'");
}

GainTimeBase gain_time_base_from_string(const std::string& s) {
  if (s == "per_sample") return GainTimeBase::per_sample;
  if (s == "per_second") return GainTimeBase::per_second;
  throw UnknownKind("unknown gain time base '" + s + "'");
}

double blade_height_from_pot(double l_p, const ControllerConfig& cfg) {
  return kHeightPerPotMm * std::clamp(l_p, kPotMinMm, kPotMaxMm) + kHeightAtZeroPot + cfg.guide_datum_mm;
}

namespace {

Interval loop_output_limits(const LoopConfig& loop, const CylinderState& cyl) {
  const double span = loop.mode == CommandMode::rate ? cyl.max_rate : (cyl.stroke_max - cyl.stroke_min);
  const double lim = span / loop.valve_gain;
  return {-lim, lim};
}

// Stroke-rate command for one loop given its stroke-space error.
double loop_command(PidController& pid, const LoopConfig& loop, double stroke_error, double reference_stroke,
                    const CylinderState& cyl, double dt, double* target_out = nullptr) {
  const double u = pid_step(pid, stroke_error, dt);
  if (loop.mode == CommandMode::rate) return loop.valve_gain * u;
  const double target = std::clamp(reference_stroke + loop.valve_gain * u, cyl.stroke_min, cyl.stroke_max);
  if (target_out) *target_out = target;
  return (target - cyl.stroke) / dt;
}

}  // namespace

ControllerState make_controller(const ControllerConfig& cfg, const CylinderState& cyl1, const CylinderState& cyl2,
                                double dt) {
  if (!(cfg.pitch.valve_gain > 0) || !(cfg.height.valve_gain > 0)) {
    throw OutOfRange("valve gains must be > 0");
  }
  if (cfg.height_gain == 0) throw OutOfRange("height_gain must be nonzero");
  const double tb = cfg.time_base == GainTimeBase::per_sample ? dt : 1.0;
  ControllerState s;
  s.pitch = PidController::make(cfg.pitch.gains, loop_output_limits(cfg.pitch, cyl1), tb);
  s.height = PidController::make(cfg.height.gains, loop_output_limits(cfg.height, cyl2), tb);
  s.held_height_target = cyl2.stroke;
  return s;
}

ControlOutput control_step(ControllerState& state, const ControllerConfig& cfg, const ControlTargets& targets,
                           const FilterState& estimate, bool pot_dropout, const CylinderState& cyl1,
                           const CylinderState& cyl2, double dt) {
  if (!estimate.x.allFinite()) throw NonFiniteState("control_step: estimate is not finite");
  ControlOutput out;

  // Pitch loop, in cylinder (1) stroke space.
  const double pitch_error = pitch_to_stroke(targets.theta_c) - pitch_to_stroke(estimate.theta());
  out.cmd1 = loop_command(state.pitch, cfg.pitch, pitch_error, pitch_to_stroke(targets.theta_c), cyl1, dt);

  // Height loop, in cylinder (2) stroke space; holds its last command on dropout.
  if (pot_dropout) {
    state.degraded = true;
    out.cmd2 = cfg.height.mode == CommandMode::rate ? state.held_height_rate
                                                    : (state.held_height_target - cyl2.stroke) / dt;
  } else {
    if (state.degraded) {
      state.height.prev_error.reset();
      state.degraded = false;
    }
    const double h_error = targets.h_c - blade_height_from_pot(estimate.l_p(), cfg);
    double target = cyl2.stroke;
    out.cmd2 = loop_command(state.height, cfg.height, h_error / cfg.height_gain, cfg.stroke2_nominal, cyl2, dt,
                            &target);
    state.held_height_rate = out.cmd2;
    state.held_height_target = target;
  }
  out.degraded = state.degraded;

  const CylinderStep c1 = cylinder_step(cyl1, out.cmd1, dt);
  const CylinderStep c2 = cylinder_step(cyl2, out.cmd2, dt);
  out.cyl1 = c1.state;
  out.cyl2 = c2.state;
  out.sat1 = c1.saturated();
  out.sat2 = c2.saturated();
  return out;
}

}  // namespace harvester
