#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace harvester {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// attitude-kinematics
class GimbalLock : public Error {
 public:
  using Error::Error;
};
class DegenerateAccel : public Error {
 public:
  using Error::Error;
};

// fusion-filter
class NonFiniteState : public Error {
 public:
  using Error::Error;
};
class SingularInnovationCov : public Error {
 public:
  using Error::Error;
};

// sensors / actuation / terrain
class OutOfRange : public Error {
 public:
  using Error::Error;
};
class OutOfEnvelope : public Error {
 public:
  using Error::Error;
};
class EmptyProfile : public Error {
 public:
  using Error::Error;
};
class UnknownKind : public Error {
 public:
  using Error::Error;
};

// evaluation
class EmptySeries : public Error {
 public:
  using Error::Error;
};
class LengthMismatch : public Error {
 public:
  using Error::Error;
};
class EmptyRecords : public Error {
 public:
  using Error::Error;
};
class ScenarioMismatch : public Error {
 public:
  using Error::Error;
};

// cli-harness
class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, std::string field, const std::string& what)
      : Error("config line " + std::to_string(line) + ", field '" + field + "': " + what),
        line_(line),
        field_(std::move(field)),
        reason_(what) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string field_;
  std::string reason_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Wraps a module error raised inside the simulation loop.
class StepError : public Error {
 public:
  StepError(std::size_t step, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace harvester
