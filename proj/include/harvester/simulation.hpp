#pragma once

// End-to-end scenario loop: terrain -> truth -> sensors -> filter -> control.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "harvester/config.hpp"

namespace harvester {

/// Everything observed during one loop step.
struct StepRecord {
  std::size_t k{0};
  double t{0};
  double s{0};
  double body_pitch{0};
  double theta_true{0};
  double hp_true{0};
  double true_bias{0};
  SensorFrame frame;
  FilterState estimate;
  StepTrace filter_trace;  // zero on the seeding step
  double theta_gyro{0};    // gyro-only integration
  double stroke1{0};       // strokes that produced the truth at t
  double stroke2{0};
  double cmd1{0};
  double cmd2{0};
  bool sat1{false};
  bool sat2{false};
  bool degraded{false};
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_step(const StepRecord& rec) = 0;
  virtual void finish() {}
};

/// Streams sensors.csv, filter.csv, truth.csv and actuators.csv into a directory.
class CsvTraceSink : public TraceSink {
 public:
  explicit CsvTraceSink(const std::filesystem::path& dir);
  void on_step(const StepRecord& rec) override;
  void finish() override;

  static constexpr const char* kSensorsFile = "sensors.csv";
  static constexpr const char* kFilterFile = "filter.csv";
  static constexpr const char* kTruthFile = "truth.csv";
  static constexpr const char* kActuatorsFile = "actuators.csv";

 private:
  std::ofstream sensors_;
  std::ofstream filter_;
  std::ofstream truth_;
  std::ofstream actuators_;
};

std::string filter_csv_header();
std::string truth_csv_header();
std::string actuators_csv_header();

struct CovarianceExtremes {
  double max_asymmetry{0};
  double min_eigen_ratio{0};  // min over steps of min_eigen / max(trace, 1)

  bool healthy(double tol = 1e-9) const { return max_asymmetry <= tol && min_eigen_ratio >= -tol; }
};

struct RunOutput {
  ScenarioConfig config;
  std::size_t steps{0};
  TimeSeries theta_true;
  TimeSeries hp_true;
  TimeSeries theta_est;
  TimeSeries bias_est;
  TimeSeries lp_est;
  TimeSeries theta_gyro;
  TimeSeries true_bias;
  TimeSeries stroke1;
  TimeSeries stroke2;
  TimeSeries cmd1;
  TimeSeries cmd2;
  std::vector<CutRecord> cuts;
  std::size_t dropout_steps{0};
  CovarianceExtremes covariance;
  RunMetrics metrics;
};

/// Number of loop steps: floor(duration / dt).
std::size_t step_count(double duration_s, double dt);

TerrainProfile build_terrain(const ScenarioConfig& cfg);

/// Deterministic given cfg. Module errors are rethrown as StepError.
RunOutput run_scenario(const ScenarioConfig& cfg, TraceSink* sink = nullptr);

/// Throws ScenarioMismatch unless the two configs differ only in control_enabled.
ComparisonReport compare_runs(const RunOutput& with_control, const RunOutput& without_control);

/// Runs the paired with/without-control scenarios concurrently.
ComparisonReport run_comparison(const ScenarioConfig& cfg);

struct SweepRow {
  std::string value;
  RunMetrics metrics;
};

/// One run per value of `key`, executed concurrently, in input order.
std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const std::string& key,
                                const std::vector<std::string>& values);

void write_run_summary(std::ostream& os, const RunOutput& out);

}  // namespace harvester
