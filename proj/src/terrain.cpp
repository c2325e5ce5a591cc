#include "harvester/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "harvester/errors.hpp"
#include "harvester/format.hpp"
#include "harvester/kinematics.hpp"

namespace harvester {

TerrainProfile::TerrainProfile(std::vector<TerrainKnot> knots) : knots_(std::move(knots)) {
  if (knots_.empty()) throw EmptyProfile("terrain profile has no knots");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i].s) || !std::isfinite(knots_[i].elevation)) {
      throw OutOfRange("terrain knot " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(knots_[i].s > knots_[i - 1].s)) {
      throw OutOfRange("terrain knots must have strictly increasing s");
    }
  }
}

double TerrainProfile::height(double s) const {
  if (knots_.empty()) throw EmptyProfile("terrain profile has no knots");
  if (s <= knots_.front().s) return knots_.front().elevation;
  if (s >= knots_.back().s) return knots_.back().elevation;
  const auto hi = std::upper_bound(knots_.begin(), knots_.end(), s,
                                   [](double v, const TerrainKnot& k) { return v < k.s; });
  const auto lo = hi - 1;
  const double w = (s - lo->s) / (hi->s - lo->s);
  return lo->elevation + w * (hi->elevation - lo->elevation);
}

double terrain_height(const TerrainProfile& profile, double s) { return profile.height(s); }

PlatformPose platform_pose(const TerrainProfile& profile, double s, double wheelbase, double cutter_ahead,
                           double cross_slope_deg) {
  if (!(wheelbase > 0)) throw OutOfRange("wheelbase must be > 0");
  const double front = profile.height(s);
  const double rear = profile.height(s - wheelbase);
  PlatformPose pose;
  pose.s = s;
  pose.body_pitch = rad2deg(std::atan((front - rear) / wheelbase));
  pose.body_roll = cross_slope_deg;
  pose.body_height = 0.5 * (front + rear);
  pose.cutter_ground = profile.height(s + cutter_ahead);
  if (!(std::abs(pose.body_pitch) < 45.0)) throw OutOfEnvelope("body pitch beyond 45 deg");
  return pose;
}

CutterTruth cutter_truth(const PlatformPose& pose, double stroke1, double stroke2, const CutterGeometry& geom) {
  if (stroke1 < geom.stroke1.min || stroke1 > geom.stroke1.max || stroke2 < geom.stroke2.min ||
      stroke2 > geom.stroke2.max) {
    throw OutOfEnvelope("cylinder stroke outside its mechanical limits");
  }
  const double mount = pose.body_height + std::tan(deg2rad(pose.body_pitch)) * geom.mount_lever_m;
  CutterTruth t;
  t.theta_true = stroke_to_pitch(stroke1) - pose.body_pitch;
  t.hp_true = geom.h_ref + geom.height_gain * (stroke2 - geom.stroke2_nominal) + 1000.0 * (mount - pose.cutter_ground);
  return t;
}

std::string to_string(CourseKind k) {
  switch (k) {
    case CourseKind::flat: return "flat";
    case CourseKind::slope_course_25m: return "slope_course_25m";
    case CourseKind::bump_course: return "bump_course";
    case CourseKind::cabbage_course: return "cabbage_course";
  }
  return "?";
}

CourseKind course_kind_from_string(const std::string& s) {
  for (CourseKind k : {CourseKind::flat, CourseKind::slope_course_25m, CourseKind::bump_course,
                       CourseKind::cabbage_course}) {
    if (to_string(k) == s) return k;
  }
  throw UnknownKind("unknown course kind '" + s + "'");
}

namespace {

// Bump centre and flat margins of the bump course.
constexpr double kBumpCentre = 6.0;
constexpr double kBumpCourseEnd = 13.0;
constexpr double kRidgeStart = 2.0;
constexpr double kRidgeEnd = 14.0;

}  // namespace

TerrainProfile scenario_course(CourseKind kind, const CourseParams& p) {
  switch (kind) {
    case CourseKind::flat:
      return TerrainProfile({{0.0, 0.0}, {p.flat_length_m, 0.0}});
    case CourseKind::slope_course_25m: {
      const double top = p.grade * p.length_m;
      return TerrainProfile({{-5.0, 0.0}, {0.0, 0.0}, {p.length_m, top}, {p.length_m + 5.0, top}});
    }
    case CourseKind::bump_course:
      return TerrainProfile({{0.0, 0.0},
                             {kBumpCentre - p.bump_ramp_m, 0.0},
                             {kBumpCentre, p.bump_height_m},
                             {kBumpCentre + p.bump_ramp_m, 0.0},
                             {kBumpCourseEnd, 0.0}});
    case CourseKind::cabbage_course: {
      // Ridge alternating between ground level and ridge height.
      std::vector<TerrainKnot> k{{0.0, 0.0}, {kRidgeStart, 0.0}};
      double s = kRidgeStart;
      bool up = true;
      while (s < kRidgeEnd) {
        const double h = up ? p.ridge_height_m : 0.0;
        s += p.ridge_ramp_m;
        k.push_back({s, h});
        s += p.ridge_plateau_m;
        k.push_back({s, h});
        up = !up;
      }
      k.push_back({s + 5.0, k.back().elevation});
      return TerrainProfile(std::move(k));
    }
  }
  throw UnknownKind("unknown course kind");
}

CourseLayout course_layout(CourseKind kind, const CourseParams& p) {
  CourseLayout l;
  switch (kind) {
    case CourseKind::flat:
      l.s_start = 0.0;
      l.s_end = p.flat_length_m;
      break;
    case CourseKind::slope_course_25m:
      l.s_start = 0.0;
      l.s_end = p.length_m;
      break;
    case CourseKind::bump_course:
      l.s_start = 2.0;
      l.s_end = kBumpCourseEnd - 2.0;
      break;
    case CourseKind::cabbage_course:
      l.s_start = 0.5;
      l.s_end = p.first_cabbage_m + p.cabbage_spacing_m * p.cabbage_count + 2.5;
      l.single_pass = true;
      for (int i = 0; i < p.cabbage_count; ++i) l.cut_positions.push_back(p.first_cabbage_m + p.cabbage_spacing_m * i);
      break;
  }
  return l;
}

double path_position(const CourseLayout& layout, double speed, double t) {
  const double span = layout.s_end - layout.s_start;
  const double d = speed * t;
  if (!(speed > 0) || !(span > 0) || !(d > 0)) return layout.s_start;
  if (layout.single_pass) return std::min(layout.s_start + d, layout.s_end);
  const double m = std::fmod(d, 2.0 * span);
  return m <= span ? layout.s_start + m : layout.s_end - (m - span);
}

int path_direction(const CourseLayout& layout, double speed, double t) {
  const double span = layout.s_end - layout.s_start;
  const double d = speed * t;
  if (!(speed > 0) || !(span > 0)) return 0;
  if (layout.single_pass) return d < span ? 1 : 0;
  return std::fmod(d, 2.0 * span) < span ? 1 : -1;
}

void write_terrain_csv(std::ostream& os, const TerrainProfile& profile) {
  os << "s_m,elev_m\n";
  for (const auto& k : profile.knots()) os << format_number(k.s) << ',' << format_number(k.elevation) << '\n';
}

TerrainProfile read_terrain_csv(std::istream& is) {
  std::vector<TerrainKnot> knots;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (body != "s_m,elev_m") throw IoError("terrain csv line " + std::to_string(line_no) + ": unexpected header");
      continue;
    }
    const auto cols = split(body, ',');
    if (cols.size() != 2) throw IoError("terrain csv line " + std::to_string(line_no) + ": expected 2 columns");
    try {
      knots.push_back({parse_number(cols[0]), parse_number(cols[1])});
    } catch (const std::invalid_argument& e) {
      throw IoError("terrain csv line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return TerrainProfile(std::move(knots));
}

}  // namespace harvester
