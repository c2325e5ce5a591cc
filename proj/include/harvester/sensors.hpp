#pragma once

// Synthetic gyro, accelerometer and linear-potentiometer readings generated
// from simulated ground truth.

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "harvester/kinematics.hpp"
#include "harvester/rng.hpp"
#include "harvester/sensor_frame.hpp"

namespace harvester {

inline constexpr double kGravity = 9.81;       // m/s^2
inline constexpr double kPotSpanMm = 100.0;    // KTC-100 stroke

struct SensorNoiseConfig {
  double gyro_white_sigma{0.05};      // deg/s
  double gyro_bias_walk_sigma{0.01};  // deg/s/sqrt(s)
  double gyro_bias_init{0.3};         // deg/s, pitch axis
  double accel_white_sigma{0.15};     // m/s^2
  double pot_white_sigma{0.3};        // mm
  double pot_quantum{0.1};            // mm, 0 disables quantization
  std::uint64_t seed{42};

  void validate() const;

  /// All sigmas, the initial bias and quantization zeroed.
  static SensorNoiseConfig noiseless(std::uint64_t seed = 42);
};

/// Gyro pitch-axis bias evolving as a random walk.
struct GyroBias {
  double value{0};

  void advance(const SensorNoiseConfig& cfg, double dt, Rng& rng) {
    value += cfg.gyro_bias_walk_sigma * std::sqrt(dt) * rng.normal();
  }
};

struct PotReading {
  double l_p{0};  // mm, clamped to [0, span]
  bool dropout{false};
};

BodyRates sample_gyro(const BodyRates& true_rates, double bias, const SensorNoiseConfig& cfg, Rng& rng);

/// Gravity rotated into the sensor frame by (phi, theta) plus white noise.
/// Noise-free output satisfies accel_to_pitch(out) == theta and accel_to_roll(out) == phi.
AccelVector sample_accel(const EulerAngles& true_attitude, const SensorNoiseConfig& cfg, Rng& rng);

/// Inverse of the slide-axis calibration with noise and quantization. The
/// argument is the guide-mechanism height the potentiometer sees, in mm.
PotReading sample_potentiometer(double true_height_hp, const SensorNoiseConfig& cfg, Rng& rng);

/// Owns the sensor RNG stream and the bias state for one scenario run.
class SensorSuite {
 public:
  explicit SensorSuite(const SensorNoiseConfig& cfg);
  SensorSuite(const SensorNoiseConfig& cfg, Rng rng);

  /// Advances the bias by dt (skipped when dt == 0) and samples every sensor.
  SensorFrame sample(double t, double dt, const EulerAngles& attitude, const BodyRates& rates,
                     double guide_height_mm);

  double bias() const { return bias_.value; }

 private:
  SensorNoiseConfig cfg_;
  Rng rng_;
  GyroBias bias_;
};

// Sensor trace CSV: t,p,q,r,ax,ay,az,lp,dropout
void write_sensor_csv_header(std::ostream& os);
void write_sensor_csv_row(std::ostream& os, const SensorFrame& f);
std::vector<SensorFrame> read_sensor_csv(std::istream& is);

}  // namespace harvester
