#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "harvester/evaluation.hpp"
#include "harvester/format.hpp"

namespace harvester::cli {
namespace {

namespace fs = std::filesystem;

struct CliTest : ::testing::Test {
  fs::path dir;
  std::ostringstream out, err;

  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("harvester_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string write_cfg(const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p.string();
  }

  int run(std::vector<std::string> args) {
    out.str("");
    err.str("");
    return cli_main(args, out, err);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

TEST_F(CliTest, RunTwiceGivesIdenticalTraces) {
  const auto cfg = write_cfg("flat.cfg", "course.kind = flat\nscenario.duration_s = 3\n");
  ASSERT_EQ(run({"run", cfg, "--out", (dir / "a").string()}), kExitOk) << err.str();
  ASSERT_EQ(run({"run", cfg, "--out", (dir / "b").string()}), kExitOk) << err.str();
  for (const char* f : {"sensors.csv", "filter.csv", "truth.csv", "actuators.csv", "summary.txt"}) {
    EXPECT_TRUE(fs::exists(dir / "a" / f)) << f;
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  EXPECT_NE(out.str().find("steps=300"), std::string::npos);
}

TEST_F(CliTest, SeedAndNoControlOverrides) {
  const auto cfg = write_cfg("s.cfg", "scenario.duration_s = 2\n");
  ASSERT_EQ(run({"run", cfg, "--out", (dir / "a").string(), "--seed", "7", "--no-control"}), kExitOk);
  const std::string saved = slurp(dir / "a" / "config.txt");
  EXPECT_NE(saved.find("scenario.seed = 7"), std::string::npos);
  EXPECT_NE(saved.find("scenario.control_enabled = false"), std::string::npos);
}

TEST_F(CliTest, CompareWritesSummary) {
  const auto cfg = write_cfg("bump.cfg", "course.kind = bump_course\nscenario.duration_s = 40\n");
  ASSERT_EQ(run({"compare", cfg, "--out", dir.string()}), kExitOk) << err.str();
  EXPECT_NE(out.str().find("improvement_h_pct="), std::string::npos);
  std::ifstream in(dir / "summary.txt");
  const auto kv = read_key_values(in);
  EXPECT_EQ(kv.size(), 8u);
  EXPECT_EQ(kv.count("improvement_h_pct"), 1u);
}

TEST_F(CliTest, SweepTable) {
  const auto cfg = write_cfg("slope.cfg", "course.kind = slope_course_25m\nscenario.duration_s = 100\n");
  ASSERT_EQ(run({"sweep", cfg, "--param", "pid_theta.kd", "--values", "0,1,3,10"}), kExitOk) << err.str();
  std::istringstream lines(out.str());
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "pid_theta.kd,rmse_theta,rmse_h,score");
  EXPECT_EQ(rows[1].substr(0, 2), "0,");
  EXPECT_EQ(rows[4].substr(0, 3), "10,");
  std::vector<double> rmse;
  for (std::size_t i = 1; i < rows.size(); ++i) rmse.push_back(std::stod(std::string(split(rows[i], ',')[1])));
  const auto best = std::min_element(rmse.begin(), rmse.end()) - rmse.begin();
  EXPECT_GT(best, 0);
  EXPECT_LT(best, 3);
}

TEST_F(CliTest, CoursesEmit) {
  ASSERT_EQ(run({"courses", "emit", "slope_course_25m"}), kExitOk);
  EXPECT_EQ(out.str().substr(0, 11), "s_m,elev_m\n");
  EXPECT_NE(out.str().find("25,2.5"), std::string::npos);
  ASSERT_EQ(run({"courses", "emit", "bump_course", "--out", dir.string()}), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "bump_course.csv"));
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  const auto cfg = write_cfg("bad.cfg", "scenario.duration_s = 3\npid_theta.kq = 1\n");
  EXPECT_EQ(run({"run", cfg, "--out", dir.string()}), kExitConfig);
  EXPECT_NE(err.str().find("line 2"), std::string::npos);
  EXPECT_NE(err.str().find("pid_theta.kq"), std::string::npos);
  EXPECT_EQ(run({"courses", "emit", "moon"}), kExitConfig);
  EXPECT_EQ(run({"sweep", cfg, "--param", "x", "--values", "1"}), kExitConfig);
  const auto ok = write_cfg("ok.cfg", "scenario.duration_s = 1\n");
  EXPECT_EQ(run({"sweep", ok, "--param", "nope.key", "--values", "1"}), kExitConfig);
}

TEST_F(CliTest, IoErrorsExitThree) {
  EXPECT_EQ(run({"run", (dir / "missing.cfg").string()}), kExitIo);
  const auto cfg = write_cfg("ok.cfg", "scenario.duration_s = 1\n");
  std::ofstream(dir / "blocker") << "x";
  EXPECT_EQ(run({"run", cfg, "--out", (dir / "blocker" / "sub").string()}), kExitIo);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}), kExitConfig);
  EXPECT_EQ(run({"fly"}), kExitConfig);
  EXPECT_EQ(run({"--help"}), kExitOk);
}

}  // namespace
}  // namespace harvester::cli
