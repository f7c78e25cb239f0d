#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgad {

/// Bad input: wrong dimension, zero direction, out-of-range option.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The model cannot provide the requested action (e.g. a transpose product
/// for a large model without an analytic adjoint).
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NumericalBlowup : public std::runtime_error {
 public:
  NumericalBlowup(const std::string& what, std::size_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class NotAFixedPoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Oblique projector of the original GAD with <w, v> ~ 0.
class DegenerateProjector : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Spectrum of Db(x_s) is complex or repeated.
class OutsideHypotheses : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sgad
