#pragma once

// Euler-angle rate conversion, pitch integration and accelerometer pitch.
// All angles at the API boundary are degrees; radians only inside trig calls.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "harvester/errors.hpp"

namespace harvester {

template <typename Scalar>
constexpr Scalar deg2rad(Scalar deg) {
  return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

template <typename Scalar>
constexpr Scalar rad2deg(Scalar rad) {
  return rad * Scalar(180) / std::numbers::pi_v<Scalar>;
}

/// Wraps an angle in degrees into (-180, 180].
template <typename Scalar>
Scalar normalize_deg(Scalar deg) {
  Scalar r = std::fmod(deg, Scalar(360));
  if (r <= Scalar(-180)) r += Scalar(360);
  if (r > Scalar(180)) r -= Scalar(360);
  return r;
}

template <typename Scalar = double>
struct EulerAnglesT {
  Scalar phi{0};    // roll, deg
  Scalar theta{0};  // pitch, deg
  Scalar psi{0};    // yaw, deg (carried, unused downstream)

  EulerAnglesT normalized() const {
    return {normalize_deg(phi), normalize_deg(theta), normalize_deg(psi)};
  }
};

template <typename Scalar = double>
struct BodyRatesT {
  Scalar p{0};  // deg/s
  Scalar q{0};
  Scalar r{0};

  Eigen::Matrix<Scalar, 3, 1> vector() const { return {p, q, r}; }
  bool finite() const { return std::isfinite(p) && std::isfinite(q) && std::isfinite(r); }
};

template <typename Scalar = double>
struct EulerRatesT {
  Scalar phi_dot{0};
  Scalar theta_dot{0};
  Scalar psi_dot{0};
};

template <typename Scalar = double>
struct AccelVectorT {
  Scalar x{0};  // m/s^2
  Scalar y{0};
  Scalar z{0};
};

using EulerAngles = EulerAnglesT<double>;
using BodyRates = BodyRatesT<double>;
using EulerRates = EulerRatesT<double>;
using AccelVector = AccelVectorT<double>;

inline constexpr double kGimbalGuardDeg = 1e-6;

/// 3x3 map from body rates [p q r] to Euler rates at the given attitude.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> euler_rate_matrix(const EulerAnglesT<Scalar>& angles) {
  const Scalar sphi = std::sin(deg2rad(angles.phi));
  const Scalar cphi = std::cos(deg2rad(angles.phi));
  const Scalar tth = std::tan(deg2rad(angles.theta));
  const Scalar cth = std::cos(deg2rad(angles.theta));
  Eigen::Matrix<Scalar, 3, 3> m;
  // clang-format off
  m << Scalar(1), sphi * tth,  cphi * tth,
       Scalar(0), cphi,        -sphi,
       Scalar(0), sphi / cth,  cphi / cth;
  // clang-format on
  return m;
}

template <typename Scalar>
EulerRatesT<Scalar> body_rates_to_euler_rates(const EulerAnglesT<Scalar>& angles,
                                              const BodyRatesT<Scalar>& rates,
                                              Scalar guard_deg = Scalar(kGimbalGuardDeg)) {
  if (!(std::abs(angles.theta) < Scalar(90) - guard_deg)) {
    throw GimbalLock("pitch " + std::to_string(static_cast<double>(angles.theta)) +
                     " deg is inside the gimbal-lock guard band");
  }
  const Eigen::Matrix<Scalar, 3, 1> e = euler_rate_matrix(angles) * rates.vector();
  return {e(0), e(1), e(2)};
}

/// Pitch rate seen by the Euler pitch angle: q cos(phi) - r sin(phi).
/// Independent of pitch itself, so no gimbal guard applies.
template <typename Scalar>
Scalar pitch_rate(Scalar phi_deg, Scalar q, Scalar r) {
  const Scalar phi = deg2rad(phi_deg);
  return q * std::cos(phi) - r * std::sin(phi);
}

template <typename Scalar>
Scalar integrate_pitch(Scalar theta_pre, Scalar phi, Scalar q, Scalar r, Scalar dt) {
  return theta_pre + dt * pitch_rate(phi, q, r);
}

/// Pitch from the gravity direction, two-argument arctangent of (y, z).
template <typename Scalar>
Scalar accel_to_pitch(const AccelVectorT<Scalar>& a) {
  if (a.y == Scalar(0) && a.z == Scalar(0)) {
    throw DegenerateAccel("accelerometer y and z are both zero");
  }
  return rad2deg(std::atan2(a.y, a.z));
}

/// Roll from the gravity direction; pairs with accel_to_pitch so that a
/// gravity-only vector built from (phi, theta) inverts exactly.
template <typename Scalar>
Scalar accel_to_roll(const AccelVectorT<Scalar>& a) {
  if (a.x == Scalar(0) && a.y == Scalar(0) && a.z == Scalar(0)) {
    throw DegenerateAccel("accelerometer vector is zero");
  }
  return rad2deg(std::atan2(-a.x, std::hypot(a.y, a.z)));
}

}  // namespace harvester
