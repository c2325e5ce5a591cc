#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "harvester/errors.hpp"
#include "harvester/fusion_filter.hpp"
#include "harvester/sensors.hpp"
#include "naive_kalman.hpp"

namespace harvester {
namespace {

FilterState make_state(double th, double b, double lp, const Mat3<double>& p = Mat3<double>::Identity()) {
  FilterState s;
  s.x << th, b, lp;
  s.p_cov = p;
  return s;
}

SensorFrame level_frame(double theta, double q, double pot, double t = 0) {
  Rng rng(1);
  SensorFrame f;
  f.t = t;
  f.gyro = {0, q, 0};
  f.accel = sample_accel(EulerAngles{0, theta, 0}, SensorNoiseConfig::noiseless(), rng);
  f.pot = pot;
  return f;
}

TEST(Predict, BiasCancelsInput) {
  FilterParams prm;
  prm.dt = 0.1;
  const FilterState out = predict(make_state(0, 1, 50), 1.0, prm);
  EXPECT_NEAR(out.theta(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(out.theta_dot_b(), 1.0);
  EXPECT_DOUBLE_EQ(out.l_p(), 50.0);
}

TEST(Predict, ZeroInputKeepsMeanAndGrowsCovariance) {
  FilterParams prm;
  prm.dt = 0.05;
  prm.q_bias = prm.q_i;  // shared intensity
  Mat3<double> p = Vec3<double>(2.0, 0.5, 3.0).asDiagonal();
  const FilterState out = predict(make_state(10, 0, 50, p), 0.0, prm);
  EXPECT_DOUBLE_EQ(out.theta(), 10.0);
  EXPECT_DOUBLE_EQ(out.l_p(), 50.0);
  EXPECT_NEAR(out.p_cov(0, 0) - 2.0, prm.dt * (prm.dt * 0.5 + prm.q_i), 1e-15);
  EXPECT_NEAR(out.p_cov(1, 1) - 0.5, prm.dt * prm.q_i, 1e-15);
  EXPECT_NEAR(out.p_cov(2, 2) - 3.0, prm.dt * prm.q_p, 1e-15);
  EXPECT_NEAR(out.p_cov(0, 1), -prm.dt * 0.5, 1e-15);
}

TEST(Predict, TopLeftEntryFromExpandedForm) {
  FilterParams prm;
  prm.dt = 0.01;
  prm.q_i = 0.001;
  const FilterState out = predict(make_state(0, 0, 0), 0.0, prm);
  // 1 + dt * (dt * 1 - 0 - 0 + q_i)
  EXPECT_NEAR(out.p_cov(0, 0), 1.00011, 1e-12);
}

TEST(Predict, NonFiniteRejected) {
  EXPECT_THROW(predict(make_state(0, 0, 0), std::numeric_limits<double>::infinity(), FilterParams{}), NonFiniteState);
}

TEST(Innovate, Examples) {
  const Vec2<double> v0 = innovate(make_state(35, 0.2, 100), Measurement{35, 100});
  EXPECT_EQ(v0, Vec2<double>(0, 0));
  const Vec2<double> v1 = innovate(make_state(30, 0, 100), Measurement{35, 110});
  EXPECT_DOUBLE_EQ(v1(0), 5);
  EXPECT_DOUBLE_EQ(v1(1), 10);
}

TEST(Innovate, BiasNeverEnters) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 10);
  for (int i = 0; i < 100; ++i) {
    const double th = n(rng), lp = n(rng);
    const Measurement z{n(rng), n(rng)};
    EXPECT_EQ(innovate(make_state(th, n(rng), lp), z), innovate(make_state(th, n(rng), lp), z));
  }
}

TEST(Gain, HugeNoiseGivesZeroGain) {
  FilterParams prm;
  prm.r_i = prm.r_p = 1e12;
  const Gain<double> k = gain(Mat3<double>::Identity().eval(), prm);
  EXPECT_LT(k.cwiseAbs().maxCoeff(), 2e-12);
}

TEST(Gain, TinyNoiseGivesProjection) {
  FilterParams prm;
  prm.r_i = prm.r_p = 1e-12;
  const Gain<double> k = gain(Mat3<double>::Identity().eval(), prm);
  Gain<double> expected;
  expected << 1, 0, 0, 0, 0, 1;
  EXPECT_LT((k - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Gain, HandEvaluatedDiagonal) {
  FilterParams prm;
  prm.r_i = 2;
  prm.r_p = 1;
  const Mat3<double> p = Vec3<double>(2, 1, 3).asDiagonal();
  const Gain<double> k = gain(p, prm);
  Gain<double> expected;
  expected << 0.5, 0, 0, 0, 0, 0.75;
  EXPECT_LT((k - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Gain, SingularInnovationCovariance) {
  FilterParams prm;
  prm.r_i = 1;
  prm.r_p = 1e-14;
  EXPECT_THROW(gain(Mat3<double>::Zero().eval(), prm), SingularInnovationCov);
}

TEST(Gain, BiasRowFromCrossTermsOnly) {
  FilterParams prm;
  Mat3<double> p;
  p << 2, 0, 0.3, 0, 5, 0, 0.3, 0, 1.5;
  const Gain<double> k = gain(p, prm);
  EXPECT_EQ(k.row(1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Update, ZeroGainLeavesStateUnchanged) {
  const Mat3<double> p = Vec3<double>(2, 1, 3).asDiagonal();
  const FilterState prior = make_state(1, 2, 3, p);
  const FilterState out = update(prior, Gain<double>::Zero().eval(), Vec2<double>(4, 5));
  EXPECT_EQ(out.x, prior.x);
  EXPECT_EQ(out.p_cov, prior.p_cov);
}

TEST(Update, ZeroInnovationShrinksCovarianceOnly) {
  const Mat3<double> p = Vec3<double>(2, 1, 3).asDiagonal();
  Gain<double> k;
  k << 0.5, 0, 0, 0, 0, 0.75;
  const FilterState prior = make_state(1, 2, 3, p);
  const FilterState out = update(prior, k, Vec2<double>::Zero().eval());
  EXPECT_EQ(out.x, prior.x);
  EXPECT_LT(out.p_cov.trace(), prior.p_cov.trace());
}

TEST(Update, HandEvaluatedExample) {
  const Mat3<double> p = Vec3<double>(2, 1, 3).asDiagonal();
  Gain<double> k;
  k << 0.5, 0, 0, 0, 0, 0.75;
  const FilterState out = update(make_state(0, 0, 0, p), k, Vec2<double>(1, 2));
  EXPECT_NEAR(out.theta(), 0.5, 1e-15);
  EXPECT_NEAR(out.theta_dot_b(), 0.0, 1e-15);
  EXPECT_NEAR(out.l_p(), 1.5, 1e-15);
  const Mat3<double> expected = Vec3<double>(1, 1, 0.75).asDiagonal();
  EXPECT_LT((out.p_cov - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Step, StationaryNoiselessIsFixedPoint) {
  FilterParams prm;
  FilterState s = make_state(35, 0, 50);
  s.roll = 0;
  const SensorFrame f = level_frame(35, 0, 50);
  for (int k = 0; k < 2000; ++k) {
    const FilterState next = step(s, f, prm);
    ASSERT_LT(std::abs(next.theta() - s.theta()), 1e-9);
    s = next;
  }
  EXPECT_NEAR(s.theta(), 35, 1e-9);
  EXPECT_NEAR(s.l_p(), 50, 1e-9);
}

TEST(Step, ConvergesToConstantGyroBias) {
  FilterParams prm;
  FilterState s = initial_state(level_frame(35, 0.5, 50), prm);
  const int n = static_cast<int>(30.0 / prm.dt);
  for (int k = 1; k <= n; ++k) s = step(s, level_frame(35, 0.5, 50, k * prm.dt), prm);
  EXPECT_NEAR(s.theta_dot_b(), 0.5, 0.05);
}

TEST(Step, HugeAccelNoiseFollowsBiasCorrectedGyro) {
  FilterParams prm;
  prm.r_i = 1e11;
  // keeps S inside the condition bound; the pot channel is decoupled from theta
  prm.r_p = 10;
  FilterState s = make_state(10, 0.2, 50);
  s.p_cov = Vec3<double>(1, 0.1, 1).asDiagonal();
  double gyro = 10;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0, 2);
  double max_diff = 0;
  for (int k = 1; k <= 1000; ++k) {
    const double q = n(rng);
    const SensorFrame f = level_frame(gyro, q, 50, k * prm.dt);
    s = step(s, f, prm);
    gyro = integrate_pitch(gyro, 0.0, q - 0.2, 0.0, prm.dt);
    max_diff = std::max(max_diff, std::abs(s.theta() - gyro));
  }
  EXPECT_LT(max_diff, 1e-6);
}

TEST(Step, NoProcessNoiseTraceNonIncreasing) {
  FilterParams prm;
  prm.q_i = prm.q_bias = prm.q_p = 0;
  FilterState s = initial_state(level_frame(20, 0, 40), prm);
  double prev = s.p_cov.trace();
  for (int k = 1; k <= 3000; ++k) {
    s = step(s, level_frame(20, 0, 40, k * prm.dt), prm);
    ASSERT_LE(s.p_cov.trace(), prev + 1e-12) << "step " << k;
    prev = s.p_cov.trace();
  }
}

TEST(Step, DropoutPredictsPotentiometerState) {
  FilterParams prm;
  FilterState s = initial_state(level_frame(35, 0, 50), prm);
  SensorFrame f = level_frame(35, 0, 0.0, prm.dt);
  f.pot_dropout = true;
  const StepTrace tr = step_traced(s, f, prm);
  EXPECT_DOUBLE_EQ(tr.posterior.l_p(), tr.apriori.l_p());
  EXPECT_EQ(tr.gain.col(1), Vec3<double>::Zero());
  const CovarianceHealth h = covariance_health(tr.posterior.p_cov);
  EXPECT_TRUE(h.symmetric());
  EXPECT_TRUE(h.psd());
}

TEST(Step, InitialStateFromFirstFrame) {
  const FilterState s = initial_state(level_frame(35, 0.1, 42.5), FilterParams{});
  EXPECT_NEAR(s.theta(), 35, 1e-12);
  EXPECT_EQ(s.theta_dot_b(), 0);
  EXPECT_EQ(s.l_p(), 42.5);
  EXPECT_EQ(s.p_cov, Mat3<double>(Vec3<double>(1, 0.1, 1).asDiagonal()));
}

struct RandomRun {
  std::vector<double> u, zt, zl;
};

RandomRun random_inputs(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nu(0, 5), nz(0, 3);
  RandomRun r;
  double th = 0;
  for (int k = 0; k < n; ++k) {
    const double u = nu(rng);
    th += 0.01 * u;
    r.u.push_back(u + 0.3);
    r.zt.push_back(th + nz(rng));
    r.zl.push_back(50 + nz(rng));
  }
  return r;
}

TEST(Oracle, MatchesPlainArrayFilter) {
  FilterParams prm;
  const naive::Params np{prm.dt, prm.q_i, prm.q_bias, prm.q_p, prm.r_i, prm.r_p};
  const RandomRun in = random_inputs(1234, 10000);

  FilterState s = make_state(1, 0, 48, Vec3<double>(1, 0.1, 1).asDiagonal());
  naive::Kf ref{{1, 0, 48}, {{1, 0, 0}, {0, 0.1, 0}, {0, 0, 1}}};
  double worst = 0;
  for (std::size_t k = 0; k < in.u.size(); ++k) {
    const FilterState prior = predict(s, in.u[k], prm);
    s = update(prior, gain(prior.p_cov, prm), innovate(prior, Measurement{in.zt[k], in.zl[k]}));
    naive::step(ref, in.u[k], in.zt[k], in.zl[k], np);
    for (int i = 0; i < 3; ++i) {
      worst = std::max(worst, std::abs(s.x(i) - ref.x[i]));
      for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(s.p_cov(i, j) - ref.p[i][j]));
    }
    const CovarianceHealth h = covariance_health(s.p_cov);
    ASSERT_TRUE(h.symmetric() && h.psd()) << "step " << k;
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Oracle, FloatInstantiationTracksDouble) {
  FilterParamsT<float> pf;
  FilterParams pd;
  FilterStateT<float> sf;
  FilterState sd;
  sf.x << 5, 0, 50;
  sd.x << 5, 0, 50;
  const RandomRun in = random_inputs(77, 500);
  for (std::size_t k = 0; k < in.u.size(); ++k) {
    const auto pf_prior = predict(sf, static_cast<float>(in.u[k]), pf);
    sf = update(pf_prior, gain(pf_prior.p_cov, pf),
                innovate(pf_prior, MeasurementT<float>{static_cast<float>(in.zt[k]), static_cast<float>(in.zl[k])}));
    const auto pd_prior = predict(sd, in.u[k], pd);
    sd = update(pd_prior, gain(pd_prior.p_cov, pd), innovate(pd_prior, Measurement{in.zt[k], in.zl[k]}));
  }
  EXPECT_NEAR(sf.theta(), sd.theta(), 1e-2);
  EXPECT_NEAR(sf.l_p(), sd.l_p(), 1e-2);
}

TEST(Oracle, DeterministicTrajectories) {
  FilterParams prm;
  const RandomRun in = random_inputs(5, 2000);
  auto run = [&] {
    FilterState s = make_state(0, 0, 50);
    for (std::size_t k = 0; k < in.u.size(); ++k) {
      const FilterState prior = predict(s, in.u[k], prm);
      s = update(prior, gain(prior.p_cov, prm), innovate(prior, Measurement{in.zt[k], in.zl[k]}));
    }
    return s;
  };
  const FilterState a = run(), b = run();
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.p_cov, b.p_cov);
}

TEST(FilterParams, Validation) {
  FilterParams p;
  EXPECT_NO_THROW(p.validate());
  p.dt = 0;
  EXPECT_THROW(p.validate(), OutOfRange);
  p = FilterParams{};
  p.r_p = 0;
  EXPECT_THROW(p.validate(), OutOfRange);
  p = FilterParams{};
  p.q_i = -1;
  EXPECT_THROW(p.validate(), OutOfRange);
}

}  // namespace
}  // namespace harvester
