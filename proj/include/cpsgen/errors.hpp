#pragma once

#include <stdexcept>
#include <string>

namespace cpsgen {

/// Base class for every error raised by the simulator and its pipeline.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite or out-of-domain numeric input.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Illegal failure-mode transition (edge not in the mode automaton).
class TransitionError : public Error {
 public:
  using Error::Error;
};

/// Controller called in a mode that does not support the operation.
class ModeError : public Error {
 public:
  using Error::Error;
};

/// Value outside its permitted range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Frame addressed along a non-existent topology edge.
class RoutingError : public Error {
 public:
  using Error::Error;
};

/// Invalid scenario configuration. The message may carry several
/// newline-separated issues; parse errors include file:line context.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Attack plan cannot be realized within the scenario.
class PlanningError : public Error {
 public:
  using Error::Error;
};

/// Log sources disagree on the scenario clock.
class SyncError : public Error {
 public:
  using Error::Error;
};

/// Filesystem / serialization failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cpsgen
