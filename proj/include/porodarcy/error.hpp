#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace porodarcy {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Mesh construction, validation or parse failure.
class MeshError : public Error {
 public:
  using Error::Error;
};

class DegenerateElementError : public MeshError {
 public:
  DegenerateElementError(int element, double det_j);
  int element() const { return element_; }
  double det_j() const { return det_j_; }

 private:
  int element_;
  double det_j_;
};

/// Drag evaluation failure. Carries the pressure at which evaluation failed and,
/// once propagated through assembly, the element that requested it.
class DragError : public Error {
 public:
  DragError(const std::string& what, double pressure, int element = -1);
  double pressure() const { return pressure_; }
  int element() const { return element_; }

 private:
  double pressure_;
  int element_;
};

class NonpositiveDragError : public DragError {
 public:
  NonpositiveDragError(double pressure, double value, int element = -1);
  double value() const { return value_; }

 private:
  double value_;
};

class DragOverflowError : public DragError {
 public:
  DragOverflowError(double pressure, double exponent, int element = -1);
  double exponent() const { return exponent_; }

 private:
  double exponent_;
};

class SingularSystemError : public Error {
 public:
  using Error::Error;
};

class UnsupportedConstraintError : public Error {
 public:
  using Error::Error;
};

class IncompatibleProblemError : public Error {
 public:
  explicit IncompatibleProblemError(double net_inflow);
  double net_inflow() const { return net_inflow_; }

 private:
  double net_inflow_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residual_norms);
  const std::vector<double>& residual_norms() const { return residual_norms_; }

 private:
  std::vector<double> residual_norms_;
};

/// Configuration parse error. `line` is 0 when the problem is not tied to a line
/// (for example a missing key).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string key, int line);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

}  // namespace porodarcy
