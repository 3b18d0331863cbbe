#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace topomap {

/// Base for errors caused by bad user input (files, flags, parameters).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class SizeError : public InputError {
 public:
  using InputError::InputError;
};

class ParameterError : public InputError {
 public:
  using InputError::InputError;
};

class EmptyShapeError : public InputError {
 public:
  using InputError::InputError;
};

class PoseError : public InputError {
 public:
  using InputError::InputError;
};

class UndefinedDistanceError : public InputError {
 public:
  using InputError::InputError;
};

/// Raised when the planner sees frontiers but none is reachable from the robot.
class UnreachableFrontierError : public std::runtime_error {
 public:
  explicit UnreachableFrontierError(const std::string& what, int step = -1)
      : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// Internal invariant violation (exit code 3 at the CLI).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace topomap
