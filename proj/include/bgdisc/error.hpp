#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bgdisc {

enum class ErrorKind {
  InvalidArgument,
  NonFinite,
  RootIsolation,
  Truncation,
  NotOsculating,
  Degenerate,
  Indeterminate,
  Resample,
  FitFailure,
  Config,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::NonFinite: return "non_finite";
    case ErrorKind::RootIsolation: return "root_isolation";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::NotOsculating: return "not_osculating";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Indeterminate: return "indeterminate";
    case ErrorKind::Resample: return "resample";
    case ErrorKind::FitFailure: return "fit_failure";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

// Every failure the library reports carries a machine-readable kind so the
// CLI can emit it as a JSON error object.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bgdisc
