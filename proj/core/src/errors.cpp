#include "zinf/errors.hpp"

namespace zinf {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid_parameter";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::NoSolution: return "no_solution";
    case ErrorKind::DimensionMismatch: return "dimension_mismatch";
    case ErrorKind::NonFinite: return "non_finite";
    case ErrorKind::NonConvergence: return "non_convergence";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::NegativeCount: return "negative_count";
    case ErrorKind::MissingColumn: return "missing_column";
    case ErrorKind::TooFewObservations: return "too_few_observations";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::EmptyPositiveCell: return "empty_positive_cell";
    case ErrorKind::EmptyData: return "empty_data";
    case ErrorKind::SingularHessian: return "singular_hessian";
    case ErrorKind::Mismatch: return "mismatch";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace zinf
