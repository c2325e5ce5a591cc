#pragma once

// RMSE, paired-run comparison and cut-quality scoring.

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace harvester {

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> values;

  void push_back(double time, double value) {
    t.push_back(time);
    values.push_back(value);
  }
  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }

  /// Throws LengthMismatch or OutOfRange (non-increasing t).
  void validate() const;
};

double rmse(double reference, const std::vector<double>& actual);
double rmse(const std::vector<double>& reference, const std::vector<double>& actual);
double rmse(double reference, const TimeSeries& actual);
double rmse(const TimeSeries& reference, const TimeSeries& actual);

struct CutRecord {
  double height_error_mm{0};
  double angle_error_deg{0};
};

struct QualityRubric {
  std::array<double, 3> height_mm{10, 25, 50};
  std::array<double, 3> angle_deg{2, 5, 10};
  std::array<double, 4> grades{100, 80, 50, 0};

  void validate() const;
};

/// Grade index 0..3 for an error magnitude; thresholds are inclusive.
int grade_index(double error, const std::array<double, 3>& thresholds);

/// Score of one cut: the worse of its height and angle grades.
double grade_cut(const CutRecord& record, const QualityRubric& rubric);

double score_cuts(const std::vector<CutRecord>& records, const QualityRubric& rubric = {});

/// 100 * (1 - with / without).
double improvement_pct(double with_value, double without_value);

struct RunMetrics {
  double rmse_theta{0};  // deg
  double rmse_h{0};      // mm
  double score{0};       // NaN when the run had no cuts
};

struct ComparisonReport {
  RunMetrics with_control;
  RunMetrics without_control;
  double improvement_theta_pct{0};
  double improvement_h_pct{0};
};

ComparisonReport compare_metrics(const RunMetrics& with_control, const RunMetrics& without_control);

/// Machine-readable key=value summary.
void write_summary(std::ostream& os, const ComparisonReport& report);

/// Human-readable table.
void write_report(std::ostream& os, const ComparisonReport& report);

/// Parses key=value lines; blank lines and '#' comments are skipped.
std::map<std::string, std::string> read_key_values(std::istream& is);

}  // namespace harvester
