#pragma once

// Field calibration maps between cutting angle / blade height and the
// cylinder and potentiometer readings.

namespace harvester::calibration {

// Cylinder (1) stroke vs cutting pitch: L = -34.304 * theta + 1949.9
inline constexpr double kStrokePerDeg = -34.304;
inline constexpr double kStrokeAtZeroDeg = 1949.9;

// Guide height vs potentiometer length: H = 1.0323 * L_p + 16.177
inline constexpr double kHeightPerPotMm = 1.0323;
inline constexpr double kHeightAtZeroPot = 16.177;

inline constexpr double kPotMinMm = 0.0;
inline constexpr double kPotMaxMm = 100.0;

// Slack for the range checks so that exact-endpoint round trips stay in range.
inline constexpr double kRangeSlack = 1e-9;

}  // namespace harvester::calibration
