#pragma once

#include <stdexcept>
#include <string>

namespace crom {

// Base class of every failure the library raises. The CLI maps subclasses to
// exit codes (1 usage, 2 I/O, 3 numerical).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Simulation state norm exceeded the blow-up bound.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, double last_stable_time)
      : NumericalError(what), last_stable_time_(last_stable_time) {}
  double last_stable_time() const { return last_stable_time_; }

 private:
  double last_stable_time_;
};

// An ensemble member left the stable region during assimilation.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, double time)
      : NumericalError(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// A covariance submatrix stayed indefinite after jitter escalation.
class DegenerateLibraryError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A per-equation feature submatrix lost column rank.
class IllPosedFitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Requested more modes than the snapshot set supports.
class RankDeficiencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// The regularized innovation covariance produced a non-finite gain.
class RegularizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace crom
