#pragma once

// Three-state Kalman filter fusing gyro pitch rate, accelerometer pitch and
// linear-potentiometer length. State x = [theta (deg), gyro bias (deg/s),
// L_p (mm)]; measurement z = [theta_acc (deg), L_p (mm)].

#include <Eigen/Dense>
#include <cassert>
#include <cmath>
#include <string>

#include "harvester/errors.hpp"
#include "harvester/kinematics.hpp"
#include "harvester/sensor_frame.hpp"

namespace harvester {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Gain = Eigen::Matrix<Scalar, 3, 2>;
template <typename Scalar>
using Observation = Eigen::Matrix<Scalar, 2, 3>;

/// Noise intensities. Q_k = diag(q_i, q_bias, q_p) * dt, R = diag(r_i, r_p).
/// Defaults are the field-tuned values; q_bias = q_i gives the shared-intensity form.
template <typename Scalar = double>
struct FilterParamsT {
  Scalar dt{0.01};
  Scalar q_i{0.001};
  Scalar q_bias{0.0001};
  Scalar q_p{0.01};
  Scalar r_i{2.0};
  Scalar r_p{0.001};
  // Low-pass coefficient for the accelerometer roll used in the pitch-rate projection.
  Scalar roll_alpha{0.1};
  // Initial covariance diagonal.
  Scalar p0_theta{1.0};
  Scalar p0_bias{0.1};
  Scalar p0_lp{1.0};

  void validate() const {
    auto fail = [](const char* what) { throw OutOfRange(std::string("filter params: ") + what); };
    if (!(dt > 0)) fail("dt must be > 0");
    if (!(q_i >= 0) || !(q_bias >= 0) || !(q_p >= 0)) fail("process noise must be >= 0");
    if (!(r_i > 0) || !(r_p > 0)) fail("measurement noise must be > 0");
    if (!(roll_alpha > 0) || roll_alpha > 1) fail("roll_alpha must be in (0, 1]");
    if (!(p0_theta >= 0) || !(p0_bias >= 0) || !(p0_lp >= 0)) fail("initial covariance must be >= 0");
  }
};

template <typename Scalar = double>
struct FilterStateT {
  Vec3<Scalar> x{Vec3<Scalar>::Zero()};
  Mat3<Scalar> p_cov{Mat3<Scalar>::Identity()};
  Scalar roll{0};  // lagged, low-passed accelerometer roll (deg)

  Scalar theta() const { return x(0); }
  Scalar theta_dot_b() const { return x(1); }
  Scalar l_p() const { return x(2); }

  bool finite() const { return x.allFinite() && p_cov.allFinite() && std::isfinite(roll); }
};

template <typename Scalar = double>
struct MeasurementT {
  Scalar theta_acc{0};
  Scalar l_p_meas{0};

  Vec2<Scalar> vector() const { return {theta_acc, l_p_meas}; }
};

using FilterParams = FilterParamsT<double>;
using FilterState = FilterStateT<double>;
using Measurement = MeasurementT<double>;

template <typename Scalar>
Mat3<Scalar> transition_matrix(Scalar dt) {
  Mat3<Scalar> a = Mat3<Scalar>::Identity();
  a(0, 1) = -dt;
  return a;
}

template <typename Scalar>
Vec3<Scalar> control_matrix(Scalar dt) {
  return {dt, Scalar(0), Scalar(0)};
}

template <typename Scalar>
Mat3<Scalar> process_noise(const FilterParamsT<Scalar>& params) {
  return Vec3<Scalar>(params.q_i, params.q_bias, params.q_p).asDiagonal() * params.dt;
}

template <typename Scalar>
Mat2<Scalar> measurement_noise(const FilterParamsT<Scalar>& params) {
  return Vec2<Scalar>(params.r_i, params.r_p).asDiagonal();
}

template <typename Scalar>
Observation<Scalar> observation_matrix() {
  Observation<Scalar> h = Observation<Scalar>::Zero();
  h(0, 0) = Scalar(1);
  h(1, 2) = Scalar(1);
  return h;
}

struct CovarianceHealth {
  double asymmetry{0};     // max |P - P^T| / max(1, max |P|)
  double min_eigen{0};
  double trace{0};

  bool symmetric(double tol = 1e-9) const { return asymmetry <= tol; }
  bool psd(double tol = 1e-9) const { return min_eigen >= -tol * std::max(trace, 1.0); }
};

template <typename Scalar>
CovarianceHealth covariance_health(const Mat3<Scalar>& p) {
  CovarianceHealth h;
  const double scale = std::max(1.0, static_cast<double>(p.cwiseAbs().maxCoeff()));
  h.asymmetry = static_cast<double>((p - p.transpose()).cwiseAbs().maxCoeff()) / scale;
  const Mat3<Scalar> sym = (p + p.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Mat3<Scalar>> es(sym, Eigen::EigenvaluesOnly);
  h.min_eigen = static_cast<double>(es.eigenvalues().minCoeff());
  h.trace = static_cast<double>(p.trace());
  return h;
}

namespace detail {

template <typename Scalar>
void require_finite(const FilterStateT<Scalar>& s, const char* where) {
  if (!s.finite()) throw NonFiniteState(std::string(where) + ": non-finite filter state");
}

}  // namespace detail

/// A-priori state: x = A x + B u, P = A P A^T + Q_k.
template <typename Scalar>
FilterStateT<Scalar> predict(const FilterStateT<Scalar>& state, Scalar u,
                             const FilterParamsT<Scalar>& params) {
  const Mat3<Scalar> a = transition_matrix(params.dt);
  FilterStateT<Scalar> out = state;
  out.x = a * state.x + control_matrix(params.dt) * u;
  out.p_cov = a * state.p_cov * a.transpose() + process_noise(params);
  detail::require_finite(out, "predict");
  return out;
}

/// v = z - H x.
template <typename Scalar>
Vec2<Scalar> innovate(const FilterStateT<Scalar>& apriori, const MeasurementT<Scalar>& z) {
  return z.vector() - observation_matrix<Scalar>() * apriori.x;
}

inline constexpr double kMaxInnovationCondition = 1e12;

/// K = P H^T S^-1 with S = H P H^T + R.
template <typename Scalar>
Gain<Scalar> gain(const Mat3<Scalar>& apriori_cov, const FilterParamsT<Scalar>& params) {
  const Observation<Scalar> h = observation_matrix<Scalar>();
  const Mat2<Scalar> s = h * apriori_cov * h.transpose() + measurement_noise(params);
  // Symmetric 2x2 eigenvalues in closed form for the condition estimate.
  const Scalar mean = (s(0, 0) + s(1, 1)) / Scalar(2);
  const Scalar half_diff = (s(0, 0) - s(1, 1)) / Scalar(2);
  const Scalar off = (s(0, 1) + s(1, 0)) / Scalar(2);
  const Scalar radius = std::hypot(half_diff, off);
  const Scalar lo = mean - radius;
  const Scalar hi = mean + radius;
  if (!(lo > Scalar(0)) || hi / lo > Scalar(kMaxInnovationCondition)) {
    throw SingularInnovationCov("innovation covariance is numerically singular");
  }
  return apriori_cov * h.transpose() * s.inverse();
}

/// x = x + K v, P = (I - K H) P, then P <- (P + P^T)/2.
template <typename Scalar>
FilterStateT<Scalar> update(const FilterStateT<Scalar>& apriori, const Gain<Scalar>& k,
                            const Vec2<Scalar>& v) {
  FilterStateT<Scalar> out = apriori;
  out.x = apriori.x + k * v;
  const Mat3<Scalar> p = (Mat3<Scalar>::Identity() - k * observation_matrix<Scalar>()) * apriori.p_cov;
  out.p_cov = (p + p.transpose()) / Scalar(2);
  detail::require_finite(out, "update");
  return out;
}

/// Angle-only correction, used while the potentiometer is in dropout.
template <typename Scalar>
FilterStateT<Scalar> update_angle_only(const FilterStateT<Scalar>& apriori, Scalar theta_acc,
                                       const FilterParamsT<Scalar>& params, Vec3<Scalar>* gain_out = nullptr) {
  const Scalar s = apriori.p_cov(0, 0) + params.r_i;
  if (!(s > Scalar(0))) throw SingularInnovationCov("angle innovation variance is not positive");
  const Vec3<Scalar> k = apriori.p_cov.col(0) / s;
  FilterStateT<Scalar> out = apriori;
  out.x = apriori.x + k * (theta_acc - apriori.x(0));
  Mat3<Scalar> ikh = Mat3<Scalar>::Identity();
  ikh.col(0) -= k;
  const Mat3<Scalar> p = ikh * apriori.p_cov;
  out.p_cov = (p + p.transpose()) / Scalar(2);
  detail::require_finite(out, "update_angle_only");
  if (gain_out) *gain_out = k;
  return out;
}

/// Intermediate quantities of one filter step, for the debug trace.
template <typename Scalar = double>
struct StepTraceT {
  FilterStateT<Scalar> apriori;
  Vec2<Scalar> innovation{Vec2<Scalar>::Zero()};
  Gain<Scalar> gain{Gain<Scalar>::Zero()};
  FilterStateT<Scalar> posterior;
  Scalar u{0};          // projected gyro pitch rate (deg/s)
  Scalar theta_acc{0};  // accelerometer pitch (deg)
};

using StepTrace = StepTraceT<double>;

/// Seeds the filter from the first frame: theta from the accelerometer, zero
/// bias, L_p from the potentiometer.
template <typename Scalar>
FilterStateT<Scalar> initial_state(const SensorFrameT<Scalar>& frame, const FilterParamsT<Scalar>& params) {
  FilterStateT<Scalar> s;
  s.x = Vec3<Scalar>(accel_to_pitch(frame.accel), Scalar(0), frame.pot);
  s.p_cov = Vec3<Scalar>(params.p0_theta, params.p0_bias, params.p0_lp).asDiagonal();
  s.roll = accel_to_roll(frame.accel);
  detail::require_finite(s, "initial_state");
  return s;
}

template <typename Scalar>
StepTraceT<Scalar> step_traced(const FilterStateT<Scalar>& state, const SensorFrameT<Scalar>& frame,
                               const FilterParamsT<Scalar>& params) {
  if (!frame.gyro.finite()) throw NonFiniteState("gyro sample is not finite");
  StepTraceT<Scalar> tr;
  tr.u = pitch_rate(state.roll, frame.gyro.q, frame.gyro.r);
  tr.theta_acc = accel_to_pitch(frame.accel);
  tr.apriori = predict(state, tr.u, params);
  if (frame.pot_dropout) {
    Vec3<Scalar> k;
    tr.posterior = update_angle_only(tr.apriori, tr.theta_acc, params, &k);
    tr.gain.col(0) = k;
    tr.innovation = Vec2<Scalar>(tr.theta_acc - tr.apriori.x(0), Scalar(0));
  } else {
    const MeasurementT<Scalar> z{tr.theta_acc, frame.pot};
    tr.innovation = innovate(tr.apriori, z);
    tr.gain = gain(tr.apriori.p_cov, params);
    tr.posterior = update(tr.apriori, tr.gain, tr.innovation);
  }
  tr.posterior.roll = state.roll + params.roll_alpha * (accel_to_roll(frame.accel) - state.roll);
#ifndef NDEBUG
  const CovarianceHealth health = covariance_health(tr.posterior.p_cov);
  assert(health.symmetric() && health.psd());
#endif
  return tr;
}

template <typename Scalar>
FilterStateT<Scalar> step(const FilterStateT<Scalar>& state, const SensorFrameT<Scalar>& frame,
                          const FilterParamsT<Scalar>& params) {
  return step_traced(state, frame, params).posterior;
}

}  // namespace harvester
