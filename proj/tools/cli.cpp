#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include "harvester/errors.hpp"
#include "harvester/format.hpp"
#include "harvester/simulation.hpp"

namespace harvester::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool no_control{false};
  std::string param;
  std::vector<std::string> values;
  std::string course_kind;
};

ScenarioConfig load(const Options& o) {
  ScenarioConfig cfg = load_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.no_control) cfg.control_enabled = false;
  return cfg;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write '" + path.string() + "'");
  return os;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

int cmd_run(const Options& o, std::ostream& out) {
  const ScenarioConfig cfg = load(o);
  const fs::path dir = o.out_dir.empty() ? fs::path("out") : fs::path(o.out_dir);
  CsvTraceSink sink(dir);
  const RunOutput result = run_scenario(cfg, &sink);
  {
    auto os = open_out(dir / "summary.txt");
    write_run_summary(os, result);
    if (!os) throw IoError("failed writing summary");
  }
  {
    auto os = open_out(dir / "config.txt");
    write_config(os, cfg);
  }
  write_run_summary(out, result);
  return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out) {
  const ScenarioConfig cfg = load(o);
  const ComparisonReport report = run_comparison(cfg);
  write_report(out, report);
  out << '\n';
  write_summary(out, report);
  if (!o.out_dir.empty()) {
    ensure_dir(o.out_dir);
    auto os = open_out(fs::path(o.out_dir) / "summary.txt");
    write_summary(os, report);
    auto rs = open_out(fs::path(o.out_dir) / "report.txt");
    write_report(rs, report);
    if (!os || !rs) throw IoError("failed writing comparison report");
  }
  return kExitOk;
}

void write_sweep_table(std::ostream& os, const std::string& param, const std::vector<SweepRow>& rows) {
  os << param << ",rmse_theta,rmse_h,score\n";
  for (const auto& r : rows) {
    os << r.value << ',' << format_number(r.metrics.rmse_theta) << ',' << format_number(r.metrics.rmse_h) << ','
       << format_number(r.metrics.score) << '\n';
  }
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const ScenarioConfig cfg = load(o);
  const auto rows = run_sweep(cfg, o.param, o.values);
  write_sweep_table(out, o.param, rows);
  if (!o.out_dir.empty()) {
    ensure_dir(o.out_dir);
    auto os = open_out(fs::path(o.out_dir) / "sweep.csv");
    write_sweep_table(os, o.param, rows);
    if (!os) throw IoError("failed writing sweep table");
  }
  return kExitOk;
}

int cmd_courses_emit(const Options& o, std::ostream& out) {
  CourseKind kind;
  try {
    kind = course_kind_from_string(o.course_kind);
  } catch (const UnknownKind& e) {
    throw ConfigError(0, "course.kind", e.what());
  }
  const TerrainProfile profile = scenario_course(kind);
  if (o.out_dir.empty()) {
    write_terrain_csv(out, profile);
  } else {
    ensure_dir(o.out_dir);
    auto os = open_out(fs::path(o.out_dir) / (o.course_kind + ".csv"));
    write_terrain_csv(os, profile);
    if (!os) throw IoError("failed writing terrain csv");
  }
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cutter attitude control simulator", "harvester_sim"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("config", o.config_path, "Scenario config file")->required();
    sub->add_option("--out", o.out_dir, "Output directory");
    sub->add_option("--seed", o.seed, "Override the config seed");
  };

  CLI::App* run = app.add_subcommand("run", "Run one scenario and write traces");
  add_common(run);
  run->add_flag("--no-control", o.no_control, "Disable the attitude control loops");

  CLI::App* compare = app.add_subcommand("compare", "Paired runs with and without control");
  add_common(compare);

  CLI::App* sweep = app.add_subcommand("sweep", "Vary one config key and tabulate RMSE");
  add_common(sweep);
  sweep->add_flag("--no-control", o.no_control, "Disable the attitude control loops");
  sweep->add_option("--param", o.param, "Dotted config key")->required();
  sweep->add_option("--values", o.values, "Comma-separated values")->required()->delimiter(',');

  CLI::App* courses = app.add_subcommand("courses", "Canonical terrain courses");
  courses->require_subcommand(1);
  CLI::App* emit = courses->add_subcommand("emit", "Write a course as terrain CSV");
  emit->add_option("kind", o.course_kind, "flat | slope_course_25m | bump_course | cabbage_course")->required();
  emit->add_option("--out", o.out_dir, "Output directory (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(o, out);
    if (*compare) return cmd_compare(o, out);
    if (*sweep) return cmd_sweep(o, out);
    if (*emit) return cmd_courses_emit(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace harvester::cli
