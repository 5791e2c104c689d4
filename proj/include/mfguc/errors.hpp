#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mfguc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Domain / subboundary combination that the library cannot handle.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A weight parameter falls outside its admissible open interval.
class ConstraintViolation : public Error {
 public:
  ConstraintViolation(const std::string& what, double lower, double upper)
      : Error(what), lower_(lower), upper_(upper) {}
  explicit ConstraintViolation(const std::string& what) : Error(what) {}

  double lower() const { return lower_; }
  double upper() const { return upper_; }

 private:
  double lower_ = 0.0;
  double upper_ = 0.0;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Iterative method stopped without meeting its tolerance.
class NonConvergence : public NumericalError {
 public:
  NonConvergence(const std::string& what, std::vector<double> history)
      : NumericalError(what), history_(std::move(history)) {}

  const std::vector<double>& history() const { return history_; }
  double last_residual() const { return history_.empty() ? 0.0 : history_.back(); }

 private:
  std::vector<double> history_;
};

/// Requested Carleman parameter would overflow the exponential weight.
class OverflowGuardError : public NumericalError {
 public:
  OverflowGuardError(const std::string& what, double max_s)
      : NumericalError(what), max_s_(max_s) {}

  double max_admissible_s() const { return max_s_; }

 private:
  double max_s_;
};

}  // namespace mfguc
