#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mha {

enum class ErrorKind {
  kInvalidCurve,
  kDomain,
  kConfiguration,
  kMeshQuality,
  kSolver,
  kDescentFailure,
  kDegenerateCurve,
  kNonConvergence,
  kPrecondition,
  kDiscontinuousParametrization,
  kIndeterminateWinding,
  kParse,
  kOutput,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` identifies the failure so
/// callers (and the CLI) can dispatch or serialize without RTTI games.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace mha
