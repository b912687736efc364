#include "mha/error.hpp"

namespace mha {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidCurve: return "invalid-curve";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kConfiguration: return "configuration";
    case ErrorKind::kMeshQuality: return "mesh-quality";
    case ErrorKind::kSolver: return "solver";
    case ErrorKind::kDescentFailure: return "descent-failure";
    case ErrorKind::kDegenerateCurve: return "degenerate-curve";
    case ErrorKind::kNonConvergence: return "non-convergence";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kDiscontinuousParametrization: return "discontinuous-parametrization";
    case ErrorKind::kIndeterminateWinding: return "indeterminate-winding";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kOutput: return "output";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace mha
