#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geodet {

/// Failure categories raised by the library. The CLI reports them by name.
enum class ErrorKind {
  Domain,
  EmptyRequest,
  ConjugatePoint,
  DegenerateOperator,
  IllSeparatedKernel,
  NonpositiveOperator,
  WrongRoute,
  Integration,
  InsufficientDegree,
  CutLocus,
  DegenerateSegment,
  DegenerateRoute,
  OutOfScope,
  Usage,
};

constexpr std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain-error";
    case ErrorKind::EmptyRequest: return "empty-request";
    case ErrorKind::ConjugatePoint: return "conjugate-point";
    case ErrorKind::DegenerateOperator: return "degenerate-operator";
    case ErrorKind::IllSeparatedKernel: return "ill-separated-kernel";
    case ErrorKind::NonpositiveOperator: return "nonpositive-operator";
    case ErrorKind::WrongRoute: return "wrong-route";
    case ErrorKind::Integration: return "integration-error";
    case ErrorKind::InsufficientDegree: return "insufficient-degree";
    case ErrorKind::CutLocus: return "cut-locus";
    case ErrorKind::DegenerateSegment: return "degenerate-segment";
    case ErrorKind::DegenerateRoute: return "degenerate-route";
    case ErrorKind::OutOfScope: return "out-of-scope";
    case ErrorKind::Usage: return "usage-error";
  }
  return "unknown-error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace geodet
