#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace stg {

/// Named scalar diagnostics attached to estimates and errors.
using Diagnostics = std::map<std::string, double>;

/// Broad failure categories, used by the CLI to pick an exit code.
enum class ErrorKind {
  validation,  // bad user input (exit 2)
  method,      // an estimator could not produce a result (exit 3)
  io,          // filesystem problems (exit 4)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& msg)
      : Error(ErrorKind::validation, msg) {}
};

struct NotSymmetric : Error {
  explicit NotSymmetric(const std::string& msg)
      : Error(ErrorKind::validation, msg) {}
};

struct NotPositiveDefinite : Error {
  explicit NotPositiveDefinite(const std::string& msg)
      : Error(ErrorKind::validation, msg) {}
};

struct NegativeShift : Error {
  explicit NegativeShift(const std::string& msg)
      : Error(ErrorKind::validation, msg) {}
};

struct FactorizationFailed : Error {
  explicit FactorizationFailed(const std::string& msg)
      : Error(ErrorKind::method, msg) {}
};

/// Rejection sampling hit max_trials before reaching the sample target.
/// Carries the partial counts so callers can report acceptance so far.
struct AcceptanceTooLow : Error {
  AcceptanceTooLow(const std::string& msg, Diagnostics diag)
      : Error(ErrorKind::method, msg), diagnostics(std::move(diag)) {}
  Diagnostics diagnostics;
};

struct DegenerateEllipse : Error {
  explicit DegenerateEllipse(const std::string& msg)
      : Error(ErrorKind::method, msg) {}
};

struct EmptyArcSet : Error {
  explicit EmptyArcSet(const std::string& msg)
      : Error(ErrorKind::method, msg) {}
};

struct LevelStall : Error {
  explicit LevelStall(const std::string& msg)
      : Error(ErrorKind::method, msg) {}
};

struct MaxLevelsExceeded : Error {
  explicit MaxLevelsExceeded(const std::string& msg)
      : Error(ErrorKind::method, msg) {}
};

/// An HDR level saw zero samples inside the next domain; the product
/// estimate collapsed to zero.
struct ZeroCount : Error {
  ZeroCount(const std::string& msg, Diagnostics diag)
      : Error(ErrorKind::method, msg), diagnostics(std::move(diag)) {}
  Diagnostics diagnostics;
};

struct NearSingularCorrelation : Error {
  explicit NearSingularCorrelation(const std::string& msg)
      : Error(ErrorKind::method, msg) {}
};

/// Inclusion-exclusion cancellation destroyed all significant digits of Z.
struct ZeroIntegral : Error {
  ZeroIntegral(const std::string& msg, Diagnostics diag)
      : Error(ErrorKind::method, msg), diagnostics(std::move(diag)) {}
  Diagnostics diagnostics;
};

struct SamplingStalled : Error {
  explicit SamplingStalled(const std::string& msg)
      : Error(ErrorKind::method, msg) {}
};

struct OutputUnwritable : Error {
  explicit OutputUnwritable(const std::string& msg)
      : Error(ErrorKind::io, msg) {}
};

}  // namespace stg
