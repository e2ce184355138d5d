#include "implquad/error.hpp"

namespace implquad {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::EmptyData: return "empty_data";
    case ErrorKind::OutOfRange: return "out_of_range";
    case ErrorKind::Argument: return "argument";
    case ErrorKind::CannotEliminate: return "cannot_eliminate";
    case ErrorKind::RankDeficiency: return "rank_deficiency";
    case ErrorKind::IncompleteData: return "incomplete_data";
    case ErrorKind::Consistency: return "consistency";
    case ErrorKind::PlanExecution: return "plan_execution";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Provenance: return "provenance";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace implquad
