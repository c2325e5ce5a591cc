#pragma once

// PID controllers, hydraulic cylinder models and the pitch/height hold loops.

#include <limits>
#include <optional>
#include <string>

#include "harvester/fusion_filter.hpp"

namespace harvester {

// ---------------------------------------------------------------------------
// Calibration maps

/// Cylinder (1) stroke (mm) holding the cutter at `theta` (deg) on level ground.
double pitch_to_stroke(double theta);

/// Exact inverse of pitch_to_stroke.
double stroke_to_pitch(double l_theta_c);

struct StrokeRange {
  double min{0};
  double max{2000};
};

struct StrokeCommand {
  double stroke{0};
  bool out_of_envelope{false};
};

/// pitch_to_stroke clamped into `range`, flagging saturation.
StrokeCommand pitch_to_stroke_clamped(double theta, const StrokeRange& range);

/// Guide height (mm) from potentiometer length; throws OutOfRange outside [0, 100] mm.
double pot_to_height(double l_p);

/// Inverse of pot_to_height (no range check).
double height_to_pot(double h_p);

// ---------------------------------------------------------------------------
// PID

struct PidGains {
  double kp{0};
  double ki{0};
  double kd{0};
};

struct Interval {
  double lo{-std::numeric_limits<double>::infinity()};
  double hi{std::numeric_limits<double>::infinity()};

  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Discrete PID. The integral accumulates e * dt / time_base and the
/// derivative is (e - e_prev) / dt * time_base, so time_base = 1 s gives the
/// continuous-time convention and time_base = dt gives per-sample gains.
struct PidController {
  PidGains gains;
  double integral{0};
  std::optional<double> prev_error;
  Interval output_limits;
  Interval integral_limits;
  double time_base{1.0};

  /// Integral clamped at output_limits / ki (anti-windup).
  static PidController make(const PidGains& gains, const Interval& output_limits, double time_base = 1.0);

  void reset() {
    integral = 0;
    prev_error.reset();
  }
};

double pid_step(PidController& ctrl, double error, double dt);

// ---------------------------------------------------------------------------
// Cylinders

struct CylinderState {
  double stroke{0};      // mm
  double stroke_min{0};  // mm
  double stroke_max{0};  // mm
  double max_rate{100};  // mm/s

  void validate() const;
  bool at_limit() const { return stroke <= stroke_min || stroke >= stroke_max; }
};

struct CylinderStep {
  CylinderState state;
  double applied_rate{0};  // mm/s actually realised
  bool rate_saturated{false};
  bool stroke_saturated{false};

  bool saturated() const { return rate_saturated || stroke_saturated; }
};

CylinderStep cylinder_step(const CylinderState& cyl, double commanded_rate, double dt);

// ---------------------------------------------------------------------------
// Attitude control loops

struct ControlTargets {
  double theta_c{35.0};  // deg
  double h_c{250.0};     // mm
};

enum class CommandMode {
  rate,      // PID output * valve gain is a stroke rate (mm/s)
  position,  // reference stroke + PID output * valve gain is a stroke target (mm)
};

enum class GainTimeBase {
  per_sample,  // gains expressed per control sample
  per_second,
};

std::string to_string(CommandMode m);
std::string to_string(GainTimeBase b);
CommandMode command_mode_from_string(const std::string& s);
GainTimeBase gain_time_base_from_string(const std::string& s);

struct LoopConfig {
  PidGains gains;
  CommandMode mode{CommandMode::rate};
  double valve_gain{10.0};  // stroke mm (or mm/s) per unit of PID output
};

struct ControllerConfig {
  LoopConfig pitch{{0.1, 0.0, 3.0}, CommandMode::rate, 10.0};
  LoopConfig height{{0.1, 0.02, 1.0}, CommandMode::position, 10.0};
  GainTimeBase time_base{GainTimeBase::per_sample};
  double stroke2_nominal{150.0};  // mm, cylinder (2) stroke giving h_ref on level ground
  double height_gain{1.0};        // blade height mm per mm of cylinder (2) stroke
  double guide_datum_mm{182.208}; // blade height minus calibrated guide height
};

/// Blade height (mm) implied by a potentiometer length, via the slide calibration.
double blade_height_from_pot(double l_p, const ControllerConfig& cfg);

struct ControllerState {
  PidController pitch;
  PidController height;
  double held_height_rate{0};
  double held_height_target{0};
  bool degraded{false};
};

ControllerState make_controller(const ControllerConfig& cfg, const CylinderState& cyl1, const CylinderState& cyl2,
                                double dt);

struct ControlOutput {
  CylinderState cyl1;
  CylinderState cyl2;
  double cmd1{0};  // commanded stroke rate, mm/s
  double cmd2{0};
  bool sat1{false};
  bool sat2{false};
  bool degraded{false};  // height loop holding its last command
};

/// One control period: pitch loop drives cylinder (1), height loop drives
/// cylinder (2), both cylinders are advanced by dt.
ControlOutput control_step(ControllerState& state, const ControllerConfig& cfg, const ControlTargets& targets,
                           const FilterState& estimate, bool pot_dropout, const CylinderState& cyl1,
                           const CylinderState& cyl2, double dt);

}  // namespace harvester
