#pragma once

#include "harvester/kinematics.hpp"

namespace harvester {

/// One sample of every sensor on the cutting device.
template <typename Scalar = double>
struct SensorFrameT {
  Scalar t{0};                 // s
  BodyRatesT<Scalar> gyro;     // deg/s
  AccelVectorT<Scalar> accel;  // m/s^2
  Scalar pot{0};               // linear potentiometer L_p, mm
  bool pot_dropout{false};     // guide wheel off the ground, pot unusable
};

using SensorFrame = SensorFrameT<double>;

}  // namespace harvester
