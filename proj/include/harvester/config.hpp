#pragma once

// Scenario configuration and its flat "section.key = value" text format.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "harvester/actuation.hpp"
#include "harvester/evaluation.hpp"
#include "harvester/fusion_filter.hpp"
#include "harvester/sensors.hpp"
#include "harvester/terrain.hpp"

namespace harvester {

struct CylinderLimits {
  double min_mm{0};
  double max_mm{0};
  double max_rate_mm_s{100};
};

struct ScenarioConfig {
  double duration_s{100.0};
  std::uint64_t seed{42};
  bool control_enabled{true};

  CourseKind course{CourseKind::slope_course_25m};
  CourseParams course_params;
  double terrain_jitter_m{0.0};  // sigma added to interior knot elevations

  double speed_mps{0.5};
  double wheelbase_m{1.5};
  double cutter_ahead_m{0.5};
  double cross_slope_deg{0.0};

  ControlTargets targets;
  double theta_offset_deg{0.0};  // initial cutter pitch minus theta_c

  FilterParams filter;
  SensorNoiseConfig noise;  // noise.seed is ignored in favour of `seed`
  ControllerConfig control;
  CylinderLimits cyl_theta{0, 2000, 100};
  CylinderLimits cyl_height{0, 300, 100};
  double cutter_h_ref_mm{250.0};
  QualityRubric rubric;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// One entry per recognised key, in canonical serialization order.
std::vector<std::string> config_keys();

std::string get_config_value(const ScenarioConfig& cfg, std::string_view key);

/// Throws ConfigError (line 0) on an unknown key or malformed value.
void set_config_value(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Parses "key = value" lines over the defaults; '#' starts a comment.
ScenarioConfig parse_config(std::istream& is);
ScenarioConfig parse_config_text(std::string_view text);
ScenarioConfig load_config(const std::string& path);

void write_config(std::ostream& os, const ScenarioConfig& cfg);
std::string serialize_config(const ScenarioConfig& cfg);

/// True when the configs agree in everything except control_enabled.
bool same_scenario(const ScenarioConfig& a, const ScenarioConfig& b);

}  // namespace harvester
