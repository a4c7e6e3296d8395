#pragma once

#include <stdexcept>
#include <string>

namespace pdcshape {

// Invalid argument or violated type invariant.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Quadrature refinement hit max_points without meeting tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double previous, double last)
      : std::runtime_error(what), previous_(previous), last_(last) {}

  double previous_estimate() const { return previous_; }
  double last_estimate() const { return last_; }

 private:
  double previous_;
  double last_;
};

// Peak search window does not contain the global maximum.
class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Curve sampled too coarsely for lobe detection.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integration window edges have not decayed.
class WindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pdcshape
