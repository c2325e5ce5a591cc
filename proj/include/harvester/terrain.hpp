#pragma once

// Terrain profiles, two-contact platform pose, and the ground-truth cutter
// state produced by the cylinder strokes. Terrain in metres, cutter in mm.

#include <iosfwd>
#include <string>
#include <vector>

#include "harvester/actuation.hpp"

namespace harvester {

struct TerrainKnot {
  double s{0};          // arc distance, m
  double elevation{0};  // m
};

/// Piecewise-linear elevation profile; clamps outside its knot range.
class TerrainProfile {
 public:
  TerrainProfile() = default;
  explicit TerrainProfile(std::vector<TerrainKnot> knots);

  const std::vector<TerrainKnot>& knots() const { return knots_; }
  bool empty() const { return knots_.empty(); }
  double height(double s) const;

 private:
  std::vector<TerrainKnot> knots_;
};

double terrain_height(const TerrainProfile& profile, double s);

struct PlatformPose {
  double s{0};              // front contact arc position, m
  double body_pitch{0};     // deg, nose-up positive
  double body_roll{0};      // deg
  double body_height{0};    // mean of the two contacts, m
  double cutter_ground{0};  // terrain elevation under the cutting point, m
};

/// Front wheel at s, rear wheel at s - wheelbase, cutting point cutter_ahead
/// metres in front of the front wheel.
PlatformPose platform_pose(const TerrainProfile& profile, double s, double wheelbase, double cutter_ahead = 0.0,
                           double cross_slope_deg = 0.0);

struct CutterGeometry {
  StrokeRange stroke1{0, 2000};
  StrokeRange stroke2{0, 300};
  double stroke2_nominal{150};  // mm
  double height_gain{1.0};      // blade mm per stroke-2 mm
  double h_ref{250};            // blade height at nominal stroke on level ground, mm
  double mount_lever_m{0.75};   // body centre to cutter mount (front axle), m
};

struct CutterTruth {
  double theta_true{0};  // deg, cutting angle
  double hp_true{0};     // mm, blade height above the ground under the cutter
};

CutterTruth cutter_truth(const PlatformPose& pose, double stroke1, double stroke2, const CutterGeometry& geom);

// ---------------------------------------------------------------------------
// Canonical courses

enum class CourseKind { flat, slope_course_25m, bump_course, cabbage_course };

std::string to_string(CourseKind k);
CourseKind course_kind_from_string(const std::string& s);

struct CourseParams {
  double grade{0.1};              // slope course rise per run
  double length_m{25.0};          // slope course length
  double flat_length_m{50.0};
  double bump_height_m{0.1};
  double bump_ramp_m{1.0};        // rise (and fall) length of the bump
  double ridge_height_m{0.1};
  double ridge_ramp_m{1.0};
  double ridge_plateau_m{0.75};
  double cabbage_spacing_m{0.5};
  int cabbage_count{15};
  double first_cabbage_m{3.0};
};

TerrainProfile scenario_course(CourseKind kind, const CourseParams& params = {});

/// Where the platform drives and where cuts happen on a course.
struct CourseLayout {
  double s_start{0};
  double s_end{0};
  bool single_pass{false};  // otherwise out-and-back repeated
  std::vector<double> cut_positions;
};

CourseLayout course_layout(CourseKind kind, const CourseParams& params = {});

/// Front-wheel arc position after driving for t seconds at `speed`.
double path_position(const CourseLayout& layout, double speed, double t);

/// Signed direction of travel at time t (+1 forward, -1 reverse, 0 stopped).
int path_direction(const CourseLayout& layout, double speed, double t);

// Terrain CSV: header "s_m,elev_m"
void write_terrain_csv(std::ostream& os, const TerrainProfile& profile);
TerrainProfile read_terrain_csv(std::istream& is);

}  // namespace harvester
