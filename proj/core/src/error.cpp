#include "nestquad/error.hpp"

namespace nestquad {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ParameterDomain: return "parameter-domain";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::NoConvergence: return "no-convergence";
    case ErrorKind::Feasibility: return "feasibility";
    case ErrorKind::Symmetry: return "symmetry";
    case ErrorKind::UnsupportedFamily: return "unsupported-family";
    case ErrorKind::DegenerateJacobian: return "degenerate-jacobian";
    case ErrorKind::Evaluation: return "evaluation";
    case ErrorKind::Io: return "io";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Integrity: return "integrity";
  }
  return "unknown";
}

}  // namespace nestquad
