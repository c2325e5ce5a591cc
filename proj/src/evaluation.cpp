#include "harvester/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>

#include "harvester/errors.hpp"
#include "harvester/format.hpp"

namespace harvester {

void TimeSeries::validate() const {
  if (t.size() != values.size()) throw LengthMismatch("time series t and values differ in length");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw OutOfRange("time series t must be strictly increasing");
  }
}

double rmse(double reference, const std::vector<double>& actual) {
  if (actual.empty()) throw EmptySeries("rmse of an empty series");
  double sum = 0;
  for (double v : actual) sum += (reference - v) * (reference - v);
  return std::sqrt(sum / static_cast<double>(actual.size()));
}

double rmse(const std::vector<double>& reference, const std::vector<double>& actual) {
  if (reference.empty() || actual.empty()) throw EmptySeries("rmse of an empty series");
  if (reference.size() != actual.size()) throw LengthMismatch("rmse series differ in length");
  double sum = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) sum += (reference[i] - actual[i]) * (reference[i] - actual[i]);
  return std::sqrt(sum / static_cast<double>(actual.size()));
}

double rmse(double reference, const TimeSeries& actual) { return rmse(reference, actual.values); }

double rmse(const TimeSeries& reference, const TimeSeries& actual) { return rmse(reference.values, actual.values); }

void QualityRubric::validate() const {
  for (const auto* th : {&height_mm, &angle_deg}) {
    if (!((*th)[0] >= 0 && (*th)[0] < (*th)[1] && (*th)[1] < (*th)[2])) {
      throw OutOfRange("rubric thresholds must be non-negative and strictly increasing");
    }
  }
}

int grade_index(double error, const std::array<double, 3>& thresholds) {
  const double e = std::abs(error);
  for (int i = 0; i < 3; ++i) {
    if (e <= thresholds[i]) return i;
  }
  return 3;
}

double grade_cut(const CutRecord& record, const QualityRubric& rubric) {
  if (!std::isfinite(record.height_error_mm) || !std::isfinite(record.angle_error_deg)) {
    throw OutOfRange("cut record is not finite");
  }
  const int worst = std::max(grade_index(record.height_error_mm, rubric.height_mm),
                             grade_index(record.angle_error_deg, rubric.angle_deg));
  return rubric.grades[worst];
}

double score_cuts(const std::vector<CutRecord>& records, const QualityRubric& rubric) {
  if (records.empty()) throw EmptyRecords("no cut records to score");
  rubric.validate();
  double sum = 0;
  for (const auto& r : records) sum += grade_cut(r, rubric);
  return sum / static_cast<double>(records.size());
}

double improvement_pct(double with_value, double without_value) {
  if (without_value == 0) {
    if (with_value == 0) return 0.0;
    throw OutOfRange("improvement undefined against a zero baseline");
  }
  return 100.0 * (1.0 - with_value / without_value);
}

ComparisonReport compare_metrics(const RunMetrics& with_control, const RunMetrics& without_control) {
  ComparisonReport r;
  r.with_control = with_control;
  r.without_control = without_control;
  r.improvement_theta_pct = improvement_pct(with_control.rmse_theta, without_control.rmse_theta);
  r.improvement_h_pct = improvement_pct(with_control.rmse_h, without_control.rmse_h);
  return r;
}

void write_summary(std::ostream& os, const ComparisonReport& r) {
  os << "rmse_theta_with=" << format_number(r.with_control.rmse_theta) << '\n'
     << "rmse_theta_without=" << format_number(r.without_control.rmse_theta) << '\n'
     << "improvement_theta_pct=" << format_number(r.improvement_theta_pct) << '\n'
     << "rmse_h_with=" << format_number(r.with_control.rmse_h) << '\n'
     << "rmse_h_without=" << format_number(r.without_control.rmse_h) << '\n'
     << "improvement_h_pct=" << format_number(r.improvement_h_pct) << '\n'
     << "score_with=" << format_number(r.with_control.score) << '\n'
     << "score_without=" << format_number(r.without_control.score) << '\n';
}

void write_report(std::ostream& os, const ComparisonReport& r) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::fixed << std::setprecision(3);
  os << std::left << std::setw(16) << "metric" << std::right << std::setw(12) << "with" << std::setw(12) << "without"
     << std::setw(14) << "improvement\n";
  os << std::left << std::setw(16) << "rmse_theta_deg" << std::right << std::setw(12) << r.with_control.rmse_theta
     << std::setw(12) << r.without_control.rmse_theta << std::setw(12) << r.improvement_theta_pct << " %\n";
  os << std::left << std::setw(16) << "rmse_h_mm" << std::right << std::setw(12) << r.with_control.rmse_h
     << std::setw(12) << r.without_control.rmse_h << std::setw(12) << r.improvement_h_pct << " %\n";
  os << std::left << std::setw(16) << "cut_score" << std::right << std::setw(12) << r.with_control.score
     << std::setw(12) << r.without_control.score << '\n';
  os.flags(flags);
  os.precision(prec);
}

std::map<std::string, std::string> read_key_values(std::istream& is) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw IoError("line " + std::to_string(line_no) + ": expected key=value");
    }
    out[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
  }
  return out;
}

}  // namespace harvester
