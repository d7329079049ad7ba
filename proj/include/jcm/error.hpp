#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jcm {

enum class ErrorKind {
  InvalidParameter,
  DimensionMismatch,
  NotHermitian,
  TraceNotOne,
  NotPositive,
  NoConvergence,
  MissingFactorization,
  AllStepsSkipped,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::TraceNotOne: return "TraceNotOne";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::MissingFactorization: return "MissingFactorization";
    case ErrorKind::AllStepsSkipped: return "AllStepsSkipped";
  }
  return "Unknown";
}

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Numerical validation failures, as opposed to bad inputs.
  bool is_numerical() const noexcept {
    return kind_ == ErrorKind::NotHermitian || kind_ == ErrorKind::TraceNotOne ||
           kind_ == ErrorKind::NotPositive || kind_ == ErrorKind::NoConvergence;
  }

 private:
  ErrorKind kind_;
};

namespace detail {

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace detail
}  // namespace jcm
