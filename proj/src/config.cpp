#include "harvester/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "harvester/errors.hpp"
#include "harvester/format.hpp"

namespace harvester {

namespace {

struct Field {
  std::string key;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, std::string_view)> set;
};

template <typename T, typename Ref>
Field make_field(std::string key, Ref ref, std::function<std::string(const T&)> fmt,
                 std::function<T(std::string_view)> parse) {
  return {std::move(key),
          [ref, fmt](const ScenarioConfig& c) { return fmt(ref(const_cast<ScenarioConfig&>(c))); },
          [ref, parse](ScenarioConfig& c, std::string_view v) { ref(c) = parse(v); }};
}

template <typename Ref>
Field num(std::string key, Ref ref) {
  return make_field<double>(std::move(key), ref, [](const double& v) { return format_number(v); },
                            [](std::string_view v) { return parse_number(v); });
}

template <typename T>
T parse_integer(std::string_view v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw std::invalid_argument("not an integer: '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("not a boolean: '" + std::string(v) + "'");
}

std::string format_triple(const std::array<double, 3>& a) {
  return format_number(a[0]) + "," + format_number(a[1]) + "," + format_number(a[2]);
}

std::array<double, 3> parse_triple(std::string_view v) {
  const auto parts = split(v, ',');
  if (parts.size() != 3) throw std::invalid_argument("expected three comma-separated numbers");
  return {parse_number(trim(parts[0])), parse_number(trim(parts[1])), parse_number(trim(parts[2]))};
}

template <typename Ref>
Field triple(std::string key, Ref ref) {
  return make_field<std::array<double, 3>>(std::move(key), ref, format_triple, parse_triple);
}

template <typename E, typename Ref>
Field enumeration(std::string key, Ref ref, E (*from)(const std::string&)) {
  return make_field<E>(std::move(key), ref, [](const E& e) { return to_string(e); },
                       [from](std::string_view v) {
                         try {
                           return from(std::string(v));
                         } catch (const UnknownKind& e) {
                           throw std::invalid_argument(e.what());
                         }
                       });
}

#define HV_REF(expr) [](ScenarioConfig& c) -> auto& { return c.expr; }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = [] {
    std::vector<Field> v;
    v.push_back(num("scenario.duration_s", HV_REF(duration_s)));
    v.push_back(make_field<std::uint64_t>(
        "scenario.seed", HV_REF(seed), [](const std::uint64_t& s) { return std::to_string(s); },
        parse_integer<std::uint64_t>));
    v.push_back(make_field<bool>(
        "scenario.control_enabled", HV_REF(control_enabled), [](const bool& b) { return std::string(b ? "true" : "false"); },
        parse_bool));

    v.push_back(enumeration<CourseKind>("course.kind", HV_REF(course), course_kind_from_string));
    v.push_back(num("course.grade", HV_REF(course_params.grade)));
    v.push_back(num("course.length_m", HV_REF(course_params.length_m)));
    v.push_back(num("course.flat_length_m", HV_REF(course_params.flat_length_m)));
    v.push_back(num("course.bump_height_m", HV_REF(course_params.bump_height_m)));
    v.push_back(num("course.bump_ramp_m", HV_REF(course_params.bump_ramp_m)));
    v.push_back(num("course.ridge_height_m", HV_REF(course_params.ridge_height_m)));
    v.push_back(num("course.ridge_ramp_m", HV_REF(course_params.ridge_ramp_m)));
    v.push_back(num("course.ridge_plateau_m", HV_REF(course_params.ridge_plateau_m)));
    v.push_back(num("course.cabbage_spacing_m", HV_REF(course_params.cabbage_spacing_m)));
    v.push_back(make_field<int>(
        "course.cabbage_count", HV_REF(course_params.cabbage_count), [](const int& n) { return std::to_string(n); },
        parse_integer<int>));
    v.push_back(num("course.first_cabbage_m", HV_REF(course_params.first_cabbage_m)));
    v.push_back(num("course.terrain_jitter_m", HV_REF(terrain_jitter_m)));

    v.push_back(num("vehicle.speed_mps", HV_REF(speed_mps)));
    v.push_back(num("vehicle.wheelbase_m", HV_REF(wheelbase_m)));
    v.push_back(num("vehicle.cutter_ahead_m", HV_REF(cutter_ahead_m)));
    v.push_back(num("vehicle.cross_slope_deg", HV_REF(cross_slope_deg)));

    v.push_back(num("targets.theta_c_deg", HV_REF(targets.theta_c)));
    v.push_back(num("targets.h_c_mm", HV_REF(targets.h_c)));
    v.push_back(num("init.theta_offset_deg", HV_REF(theta_offset_deg)));

    v.push_back(num("filter.dt", HV_REF(filter.dt)));
    v.push_back(num("filter.q_i", HV_REF(filter.q_i)));
    v.push_back(num("filter.q_bias", HV_REF(filter.q_bias)));
    v.push_back(num("filter.q_p", HV_REF(filter.q_p)));
    v.push_back(num("filter.r_i", HV_REF(filter.r_i)));
    v.push_back(num("filter.r_p", HV_REF(filter.r_p)));
    v.push_back(num("filter.roll_alpha", HV_REF(filter.roll_alpha)));
    v.push_back(num("filter.p0_theta", HV_REF(filter.p0_theta)));
    v.push_back(num("filter.p0_bias", HV_REF(filter.p0_bias)));
    v.push_back(num("filter.p0_lp", HV_REF(filter.p0_lp)));

    v.push_back(num("noise.gyro_white_sigma", HV_REF(noise.gyro_white_sigma)));
    v.push_back(num("noise.gyro_bias_walk_sigma", HV_REF(noise.gyro_bias_walk_sigma)));
    v.push_back(num("noise.gyro_bias_init", HV_REF(noise.gyro_bias_init)));
    v.push_back(num("noise.accel_white_sigma", HV_REF(noise.accel_white_sigma)));
    v.push_back(num("noise.pot_white_sigma", HV_REF(noise.pot_white_sigma)));
    v.push_back(num("noise.pot_quantum", HV_REF(noise.pot_quantum)));

    v.push_back(num("pid_theta.kp", HV_REF(control.pitch.gains.kp)));
    v.push_back(num("pid_theta.ki", HV_REF(control.pitch.gains.ki)));
    v.push_back(num("pid_theta.kd", HV_REF(control.pitch.gains.kd)));
    v.push_back(num("pid_height.kp", HV_REF(control.height.gains.kp)));
    v.push_back(num("pid_height.ki", HV_REF(control.height.gains.ki)));
    v.push_back(num("pid_height.kd", HV_REF(control.height.gains.kd)));

    v.push_back(enumeration<GainTimeBase>("control.time_base", HV_REF(control.time_base), gain_time_base_from_string));
    v.push_back(enumeration<CommandMode>("control.theta_mode", HV_REF(control.pitch.mode), command_mode_from_string));
    v.push_back(num("control.theta_valve_gain", HV_REF(control.pitch.valve_gain)));
    v.push_back(enumeration<CommandMode>("control.height_mode", HV_REF(control.height.mode), command_mode_from_string));
    v.push_back(num("control.height_valve_gain", HV_REF(control.height.valve_gain)));
    v.push_back(num("control.stroke2_nominal_mm", HV_REF(control.stroke2_nominal)));
    v.push_back(num("control.height_gain", HV_REF(control.height_gain)));
    v.push_back(num("control.guide_datum_mm", HV_REF(control.guide_datum_mm)));

    v.push_back(num("cyl_theta.min_mm", HV_REF(cyl_theta.min_mm)));
    v.push_back(num("cyl_theta.max_mm", HV_REF(cyl_theta.max_mm)));
    v.push_back(num("cyl_theta.max_rate_mm_s", HV_REF(cyl_theta.max_rate_mm_s)));
    v.push_back(num("cyl_height.min_mm", HV_REF(cyl_height.min_mm)));
    v.push_back(num("cyl_height.max_mm", HV_REF(cyl_height.max_mm)));
    v.push_back(num("cyl_height.max_rate_mm_s", HV_REF(cyl_height.max_rate_mm_s)));

    v.push_back(num("cutter.h_ref_mm", HV_REF(cutter_h_ref_mm)));

    v.push_back(triple("rubric.height_mm", HV_REF(rubric.height_mm)));
    v.push_back(triple("rubric.angle_deg", HV_REF(rubric.angle_deg)));
    return v;
  }();
  return f;
}

#undef HV_REF

const Field& find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError(0, std::string(key), "unknown key");
}

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ConfigError(0, field, what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0; }

void check_cylinder(const CylinderLimits& c, const char* min_key, const char* rate_key) {
  require(std::isfinite(c.min_mm) && std::isfinite(c.max_mm) && c.min_mm < c.max_mm, min_key,
          "cylinder min must be below max");
  require(finite_positive(c.max_rate_mm_s), rate_key, "must be > 0");
}

}  // namespace

void ScenarioConfig::validate() const {
  require(finite_positive(duration_s), "scenario.duration_s", "must be > 0");
  require(std::isfinite(speed_mps) && speed_mps >= 0, "vehicle.speed_mps", "must be >= 0");
  require(finite_positive(wheelbase_m), "vehicle.wheelbase_m", "must be > 0");
  require(std::isfinite(cutter_ahead_m) && cutter_ahead_m >= 0, "vehicle.cutter_ahead_m", "must be >= 0");
  require(std::abs(cross_slope_deg) < 45, "vehicle.cross_slope_deg", "must be within +/-45");
  require(std::abs(targets.theta_c) < 90, "targets.theta_c_deg", "must be within +/-90");
  require(std::isfinite(targets.h_c), "targets.h_c_mm", "must be finite");
  require(std::isfinite(theta_offset_deg), "init.theta_offset_deg", "must be finite");
  require(std::isfinite(terrain_jitter_m) && terrain_jitter_m >= 0, "course.terrain_jitter_m", "must be >= 0");
  require(finite_positive(course_params.length_m), "course.length_m", "must be > 0");
  require(finite_positive(course_params.flat_length_m), "course.flat_length_m", "must be > 0");
  require(finite_positive(course_params.bump_ramp_m), "course.bump_ramp_m", "must be > 0");
  require(finite_positive(course_params.ridge_ramp_m), "course.ridge_ramp_m", "must be > 0");
  require(finite_positive(course_params.ridge_plateau_m), "course.ridge_plateau_m", "must be > 0");
  require(finite_positive(course_params.cabbage_spacing_m), "course.cabbage_spacing_m", "must be > 0");
  require(course_params.cabbage_count >= 0, "course.cabbage_count", "must be >= 0");
  require(std::isfinite(course_params.grade) && std::abs(course_params.grade) < 1, "course.grade",
          "must be within +/-1");
  try {
    filter.validate();
  } catch (const Error& e) {
    throw ConfigError(0, "filter", e.what());
  }
  try {
    noise.validate();
  } catch (const Error& e) {
    throw ConfigError(0, "noise", e.what());
  }
  try {
    rubric.validate();
  } catch (const Error& e) {
    throw ConfigError(0, "rubric", e.what());
  }
  require(finite_positive(control.pitch.valve_gain), "control.theta_valve_gain", "must be > 0");
  require(finite_positive(control.height.valve_gain), "control.height_valve_gain", "must be > 0");
  require(std::isfinite(control.height_gain) && control.height_gain != 0, "control.height_gain", "must be nonzero");
  require(std::isfinite(control.stroke2_nominal), "control.stroke2_nominal_mm", "must be finite");
  require(std::isfinite(control.guide_datum_mm), "control.guide_datum_mm", "must be finite");
  for (const auto* g : {&control.pitch.gains, &control.height.gains}) {
    require(std::isfinite(g->kp) && std::isfinite(g->ki) && std::isfinite(g->kd), "pid", "gains must be finite");
  }
  check_cylinder(cyl_theta, "cyl_theta.min_mm", "cyl_theta.max_rate_mm_s");
  check_cylinder(cyl_height, "cyl_height.min_mm", "cyl_height.max_rate_mm_s");
  require(std::isfinite(cutter_h_ref_mm), "cutter.h_ref_mm", "must be finite");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

std::string get_config_value(const ScenarioConfig& cfg, std::string_view key) { return find_field(key).get(cfg); }

void set_config_value(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  const Field& f = find_field(key);
  try {
    f.set(cfg, trim(value));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, std::string(key), e.what());
  }
}

ScenarioConfig parse_config(std::istream& is) {
  ScenarioConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto body = line;
    if (const auto hash = body.find('#'); hash != std::string::npos) body.resize(hash);
    const auto text = trim(body);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, std::string(text), "expected key = value");
    const std::string key(trim(text.substr(0, eq)));
    if (!seen.insert(key).second) throw ConfigError(line_no, key, "duplicate key");
    try {
      set_config_value(cfg, key, text.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(line_no, key, e.reason());
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig parse_config_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  return parse_config(is);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& os, const ScenarioConfig& cfg) {
  std::string section;
  for (const auto& f : fields()) {
    const std::string sec = f.key.substr(0, f.key.find('.'));
    if (sec != section) {
      if (!section.empty()) os << '\n';
      section = sec;
    }
    os << f.key << " = " << f.get(cfg) << '\n';
  }
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::ostringstream os;
  write_config(os, cfg);
  return os.str();
}

bool same_scenario(const ScenarioConfig& a, const ScenarioConfig& b) {
  ScenarioConfig bb = b;
  bb.control_enabled = a.control_enabled;
  return serialize_config(a) == serialize_config(bb);
}

}  // namespace harvester
