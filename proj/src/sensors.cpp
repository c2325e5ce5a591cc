#include "harvester/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "harvester/calibration.hpp"
#include "harvester/errors.hpp"
#include "harvester/format.hpp"

namespace harvester {

void SensorNoiseConfig::validate() const {
  if (!(gyro_white_sigma >= 0) || !(gyro_bias_walk_sigma >= 0) || !(accel_white_sigma >= 0) ||
      !(pot_white_sigma >= 0)) {
    throw OutOfRange("sensor noise sigmas must be >= 0");
  }
  if (!(pot_quantum >= 0)) throw OutOfRange("pot_quantum must be >= 0");
  if (!std::isfinite(gyro_bias_init)) throw OutOfRange("gyro_bias_init must be finite");
}

SensorNoiseConfig SensorNoiseConfig::noiseless(std::uint64_t seed) {
  SensorNoiseConfig c;
  c.gyro_white_sigma = 0;
  c.gyro_bias_walk_sigma = 0;
  c.gyro_bias_init = 0;
  c.accel_white_sigma = 0;
  c.pot_white_sigma = 0;
  c.pot_quantum = 0;
  c.seed = seed;
  return c;
}

BodyRates sample_gyro(const BodyRates& true_rates, double bias, const SensorNoiseConfig& cfg, Rng& rng) {
  BodyRates out;
  out.p = true_rates.p + rng.normal(cfg.gyro_white_sigma);
  out.q = true_rates.q + bias + rng.normal(cfg.gyro_white_sigma);
  out.r = true_rates.r + rng.normal(cfg.gyro_white_sigma);
  return out;
}

AccelVector sample_accel(const EulerAngles& true_attitude, const SensorNoiseConfig& cfg, Rng& rng) {
  const double phi = deg2rad(true_attitude.phi);
  const double theta = deg2rad(true_attitude.theta);
  AccelVector a;
  a.x = -kGravity * std::sin(phi);
  a.y = kGravity * std::cos(phi) * std::sin(theta);
  a.z = kGravity * std::cos(phi) * std::cos(theta);
  a.x += rng.normal(cfg.accel_white_sigma);
  a.y += rng.normal(cfg.accel_white_sigma);
  a.z += rng.normal(cfg.accel_white_sigma);
  return a;
}

PotReading sample_potentiometer(double true_height_hp, const SensorNoiseConfig& cfg, Rng& rng) {
  using namespace calibration;
  const double ideal = (true_height_hp - kHeightAtZeroPot) / kHeightPerPotMm;
  double l_p = ideal + rng.normal(cfg.pot_white_sigma);
  if (cfg.pot_quantum > 0) l_p = std::round(l_p / cfg.pot_quantum) * cfg.pot_quantum;

  PotReading out;
  out.dropout = ideal < kPotMinMm - kRangeSlack || ideal > kPotMaxMm + kRangeSlack;
  out.l_p = std::clamp(l_p, kPotMinMm, kPotMaxMm);
  return out;
}

SensorSuite::SensorSuite(const SensorNoiseConfig& cfg) : SensorSuite(cfg, Rng::stream(cfg.seed, "sensor")) {}

SensorSuite::SensorSuite(const SensorNoiseConfig& cfg, Rng rng) : cfg_(cfg), rng_(std::move(rng)) {
  cfg_.validate();
  bias_.value = cfg_.gyro_bias_init;
}

SensorFrame SensorSuite::sample(double t, double dt, const EulerAngles& attitude, const BodyRates& rates,
                                double guide_height_mm) {
  if (dt > 0) bias_.advance(cfg_, dt, rng_);
  SensorFrame f;
  f.t = t;
  f.gyro = sample_gyro(rates, bias_.value, cfg_, rng_);
  f.accel = sample_accel(attitude, cfg_, rng_);
  const PotReading pot = sample_potentiometer(guide_height_mm, cfg_, rng_);
  f.pot = pot.l_p;
  f.pot_dropout = pot.dropout;
  return f;
}

void write_sensor_csv_header(std::ostream& os) { os << "t,p,q,r,ax,ay,az,lp,dropout\n"; }

void write_sensor_csv_row(std::ostream& os, const SensorFrame& f) {
  os << format_number(f.t) << ',' << format_number(f.gyro.p) << ',' << format_number(f.gyro.q) << ','
     << format_number(f.gyro.r) << ',' << format_number(f.accel.x) << ',' << format_number(f.accel.y) << ','
     << format_number(f.accel.z) << ',' << format_number(f.pot) << ',' << (f.pot_dropout ? 1 : 0) << '\n';
}

std::vector<SensorFrame> read_sensor_csv(std::istream& is) {
  std::vector<SensorFrame> frames;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (body != "t,p,q,r,ax,ay,az,lp,dropout") {
        throw IoError("sensor csv line " + std::to_string(line_no) + ": unexpected header");
      }
      continue;
    }
    const auto cols = split(body, ',');
    if (cols.size() != 9) {
      throw IoError("sensor csv line " + std::to_string(line_no) + ": expected 9 columns");
    }
    try {
      SensorFrame f;
      f.t = parse_number(cols[0]);
      f.gyro = {parse_number(cols[1]), parse_number(cols[2]), parse_number(cols[3])};
      f.accel = {parse_number(cols[4]), parse_number(cols[5]), parse_number(cols[6])};
      f.pot = parse_number(cols[7]);
      f.pot_dropout = parse_number(cols[8]) != 0.0;
      if (!frames.empty() && !(f.t > frames.back().t)) {
        throw IoError("time is not strictly increasing");
      }
      frames.push_back(f);
    } catch (const std::exception& e) {
      throw IoError("sensor csv line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header_seen) throw IoError("sensor csv: missing header");
  return frames;
}

}  // namespace harvester
