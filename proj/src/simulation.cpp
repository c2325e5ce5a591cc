#include "harvester/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>

#include "harvester/errors.hpp"
#include "harvester/format.hpp"

namespace harvester {

namespace {

std::ofstream open_trace(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open trace file '" + path.string() + "'");
  return os;
}

void track(CovarianceExtremes& ext, const Mat3<double>& p) {
  const CovarianceHealth h = covariance_health(p);
  ext.max_asymmetry = std::max(ext.max_asymmetry, h.asymmetry);
  ext.min_eigen_ratio = std::min(ext.min_eigen_ratio, h.min_eigen / std::max(h.trace, 1.0));
}

}  // namespace

std::string filter_csv_header() {
  return "t,theta,theta_dot_b,l_p,roll,u,theta_acc,innov_theta,innov_lp,k00,k01,k10,k11,k20,k21,"
         "p00,p01,p02,p11,p12,p22";
}

std::string truth_csv_header() { return "t,s,body_pitch,theta_true,hp_true,true_bias,theta_gyro"; }

std::string actuators_csv_header() { return "t,stroke1,stroke2,cmd1,cmd2,sat1,sat2"; }

CsvTraceSink::CsvTraceSink(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  sensors_ = open_trace(dir / kSensorsFile);
  filter_ = open_trace(dir / kFilterFile);
  truth_ = open_trace(dir / kTruthFile);
  actuators_ = open_trace(dir / kActuatorsFile);
  write_sensor_csv_header(sensors_);
  filter_ << filter_csv_header() << '\n';
  truth_ << truth_csv_header() << '\n';
  actuators_ << actuators_csv_header() << '\n';
}

void CsvTraceSink::on_step(const StepRecord& r) {
  write_sensor_csv_row(sensors_, r.frame);

  const auto& e = r.estimate;
  const auto& tr = r.filter_trace;
  filter_ << format_number(r.t);
  for (double v : {e.theta(), e.theta_dot_b(), e.l_p(), e.roll, tr.u, tr.theta_acc, tr.innovation(0),
                   tr.innovation(1)}) {
    filter_ << ',' << format_number(v);
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) filter_ << ',' << format_number(tr.gain(i, j));
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) filter_ << ',' << format_number(e.p_cov(i, j));
  }
  filter_ << '\n';

  truth_ << format_number(r.t) << ',' << format_number(r.s) << ',' << format_number(r.body_pitch) << ','
         << format_number(r.theta_true) << ',' << format_number(r.hp_true) << ',' << format_number(r.true_bias)
         << ',' << format_number(r.theta_gyro) << '\n';

  actuators_ << format_number(r.t) << ',' << format_number(r.stroke1) << ',' << format_number(r.stroke2) << ','
             << format_number(r.cmd1) << ',' << format_number(r.cmd2) << ',' << (r.sat1 ? 1 : 0) << ','
             << (r.sat2 ? 1 : 0) << '\n';
}

void CsvTraceSink::finish() {
  for (auto* os : {&sensors_, &filter_, &truth_, &actuators_}) {
    os->flush();
    if (!*os) throw IoError("failed writing trace files");
  }
}

std::size_t step_count(double duration_s, double dt) {
  if (!(dt > 0) || !(duration_s > 0)) return 0;
  // Guard against ratios like 60 / 0.01 landing just below an integer.
  return static_cast<std::size_t>(std::floor(duration_s / dt + 1e-9));
}

TerrainProfile build_terrain(const ScenarioConfig& cfg) {
  TerrainProfile base = scenario_course(cfg.course, cfg.course_params);
  if (cfg.terrain_jitter_m <= 0) return base;
  Rng rng = Rng::stream(cfg.seed, "terrain-jitter");
  std::vector<TerrainKnot> knots = base.knots();
  for (std::size_t i = 1; i + 1 < knots.size(); ++i) knots[i].elevation += rng.normal(cfg.terrain_jitter_m);
  return TerrainProfile(std::move(knots));
}

RunOutput run_scenario(const ScenarioConfig& cfg, TraceSink* sink) {
  cfg.validate();
  const double dt = cfg.filter.dt;
  const std::size_t n = step_count(cfg.duration_s, dt);

  const TerrainProfile terrain = build_terrain(cfg);
  const CourseLayout layout = course_layout(cfg.course, cfg.course_params);

  CutterGeometry geom;
  geom.stroke1 = {cfg.cyl_theta.min_mm, cfg.cyl_theta.max_mm};
  geom.stroke2 = {cfg.cyl_height.min_mm, cfg.cyl_height.max_mm};
  geom.stroke2_nominal = cfg.control.stroke2_nominal;
  geom.height_gain = cfg.control.height_gain;
  geom.h_ref = cfg.cutter_h_ref_mm;
  geom.mount_lever_m = 0.5 * cfg.wheelbase_m;

  SensorNoiseConfig noise = cfg.noise;
  noise.seed = cfg.seed;
  SensorSuite sensors(noise);

  RunOutput out;
  out.config = cfg;
  out.steps = n;
  out.covariance.min_eigen_ratio = std::numeric_limits<double>::infinity();

  // Start on target in height and at theta_c + offset in pitch.
  CylinderState cyl1{0, cfg.cyl_theta.min_mm, cfg.cyl_theta.max_mm, cfg.cyl_theta.max_rate_mm_s};
  CylinderState cyl2{0, cfg.cyl_height.min_mm, cfg.cyl_height.max_mm, cfg.cyl_height.max_rate_mm_s};
  try {
    const PlatformPose pose0 = platform_pose(terrain, path_position(layout, cfg.speed_mps, 0.0), cfg.wheelbase_m,
                                             cfg.cutter_ahead_m, cfg.cross_slope_deg);
    cyl1.stroke = std::clamp(pitch_to_stroke(cfg.targets.theta_c + cfg.theta_offset_deg + pose0.body_pitch),
                             cyl1.stroke_min, cyl1.stroke_max);
    const double s2_nom = std::clamp(geom.stroke2_nominal, cyl2.stroke_min, cyl2.stroke_max);
    const double hp_nom = cutter_truth(pose0, cyl1.stroke, s2_nom, geom).hp_true;
    cyl2.stroke = std::clamp(s2_nom + (cfg.targets.h_c - hp_nom) / geom.height_gain, cyl2.stroke_min,
                             cyl2.stroke_max);
  } catch (const Error& e) {
    throw StepError(0, e.what());
  }
  ControllerState ctrl = make_controller(cfg.control, cyl1, cyl2, dt);

  FilterState est;
  double theta_gyro = 0;
  double prev_theta = 0;
  double prev_cutter_s = 0;

  for (std::size_t k = 0; k < n; ++k) {
    StepRecord rec;
    rec.k = k;
    rec.t = static_cast<double>(k) * dt;
    try {
      rec.s = path_position(layout, cfg.speed_mps, rec.t);
      const PlatformPose pose =
          platform_pose(terrain, rec.s, cfg.wheelbase_m, cfg.cutter_ahead_m, cfg.cross_slope_deg);
      const CutterTruth truth = cutter_truth(pose, cyl1.stroke, cyl2.stroke, geom);
      rec.body_pitch = pose.body_pitch;
      rec.theta_true = truth.theta_true;
      rec.hp_true = truth.hp_true;
      rec.stroke1 = cyl1.stroke;
      rec.stroke2 = cyl2.stroke;

      const double q_true = k == 0 ? 0.0 : (truth.theta_true - prev_theta) / dt;
      prev_theta = truth.theta_true;
      const EulerAngles attitude{cfg.cross_slope_deg, truth.theta_true, 0.0};
      const BodyRates rates{0.0, q_true, 0.0};
      rec.frame = sensors.sample(rec.t, k == 0 ? 0.0 : dt, attitude, rates,
                                 truth.hp_true - cfg.control.guide_datum_mm);
      rec.true_bias = sensors.bias();

      if (k == 0) {
        est = initial_state(rec.frame, cfg.filter);
        rec.filter_trace.apriori = est;
        rec.filter_trace.posterior = est;
        rec.filter_trace.theta_acc = est.theta();
        theta_gyro = est.theta();
      } else {
        const double roll_prev = est.roll;
        rec.filter_trace = step_traced(est, rec.frame, cfg.filter);
        track(out.covariance, rec.filter_trace.apriori.p_cov);
        est = rec.filter_trace.posterior;
        theta_gyro = integrate_pitch(theta_gyro, roll_prev, rec.frame.gyro.q, rec.frame.gyro.r, dt);
      }
      track(out.covariance, est.p_cov);
      rec.estimate = est;
      rec.theta_gyro = theta_gyro;
      if (rec.frame.pot_dropout) ++out.dropout_steps;

      if (cfg.control_enabled) {
        const ControlOutput c =
            control_step(ctrl, cfg.control, cfg.targets, est, rec.frame.pot_dropout, cyl1, cyl2, dt);
        rec.cmd1 = c.cmd1;
        rec.cmd2 = c.cmd2;
        rec.sat1 = c.sat1;
        rec.sat2 = c.sat2;
        rec.degraded = c.degraded;
        cyl1 = c.cyl1;
        cyl2 = c.cyl2;
      }
    } catch (const StepError&) {
      throw;
    } catch (const Error& e) {
      throw StepError(k, e.what());
    }

    const double cutter_s = rec.s + cfg.cutter_ahead_m;
    if (k > 0) {
      for (double p : layout.cut_positions) {
        if (prev_cutter_s < p && p <= cutter_s) {
          out.cuts.push_back({rec.hp_true - cfg.targets.h_c, rec.theta_true - cfg.targets.theta_c});
        }
      }
    }
    prev_cutter_s = cutter_s;

    out.theta_true.push_back(rec.t, rec.theta_true);
    out.hp_true.push_back(rec.t, rec.hp_true);
    out.theta_est.push_back(rec.t, est.theta());
    out.bias_est.push_back(rec.t, est.theta_dot_b());
    out.lp_est.push_back(rec.t, est.l_p());
    out.theta_gyro.push_back(rec.t, rec.theta_gyro);
    out.true_bias.push_back(rec.t, rec.true_bias);
    out.stroke1.push_back(rec.t, rec.stroke1);
    out.stroke2.push_back(rec.t, rec.stroke2);
    out.cmd1.push_back(rec.t, rec.cmd1);
    out.cmd2.push_back(rec.t, rec.cmd2);
    if (sink) sink->on_step(rec);
  }
  if (sink) sink->finish();

  if (n > 0) {
    out.metrics.rmse_theta = rmse(cfg.targets.theta_c, out.theta_true);
    out.metrics.rmse_h = rmse(cfg.targets.h_c, out.hp_true);
  } else {
    out.covariance.min_eigen_ratio = 0;
  }
  out.metrics.score = out.cuts.empty() ? std::numeric_limits<double>::quiet_NaN() : score_cuts(out.cuts, cfg.rubric);
  return out;
}

ComparisonReport compare_runs(const RunOutput& with_control, const RunOutput& without_control) {
  if (!same_scenario(with_control.config, without_control.config)) {
    throw ScenarioMismatch("paired runs differ in more than the control flag");
  }
  return compare_metrics(with_control.metrics, without_control.metrics);
}

ComparisonReport run_comparison(const ScenarioConfig& cfg) {
  ScenarioConfig on = cfg;
  ScenarioConfig off = cfg;
  on.control_enabled = true;
  off.control_enabled = false;
  auto fut_on = std::async(std::launch::async, [on] { return run_scenario(on); });
  RunOutput r_off = run_scenario(off);
  RunOutput r_on = fut_on.get();
  return compare_runs(r_on, r_off);
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const std::string& key,
                                const std::vector<std::string>& values) {
  std::vector<ScenarioConfig> configs;
  for (const auto& v : values) {
    ScenarioConfig c = cfg;
    set_config_value(c, key, v);
    c.validate();
    configs.push_back(std::move(c));
  }
  std::vector<std::future<RunOutput>> futures;
  for (const auto& c : configs) futures.push_back(std::async(std::launch::async, [c] { return run_scenario(c); }));
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < futures.size(); ++i) rows.push_back({values[i], futures[i].get().metrics});
  return rows;
}

void write_run_summary(std::ostream& os, const RunOutput& out) {
  os << "steps=" << out.steps << '\n'
     << "rmse_theta=" << format_number(out.metrics.rmse_theta) << '\n'
     << "rmse_h=" << format_number(out.metrics.rmse_h) << '\n'
     << "score=" << format_number(out.metrics.score) << '\n'
     << "cuts=" << out.cuts.size() << '\n'
     << "dropout_steps=" << out.dropout_steps << '\n'
     << "cov_max_asymmetry=" << format_number(out.covariance.max_asymmetry) << '\n'
     << "cov_min_eigen_ratio=" << format_number(out.covariance.min_eigen_ratio) << '\n';
}

}  // namespace harvester
