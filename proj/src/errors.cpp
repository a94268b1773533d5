#include "rfk/errors.hpp"

namespace rfk {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_signature: return "invalid-signature";
    case ErrorCode::singular_fiber: return "singular-fiber";
    case ErrorCode::domain: return "domain";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::pole: return "pole";
    case ErrorCode::dirac_string: return "dirac-string";
    case ErrorCode::chart_boundary: return "chart-boundary";
    case ErrorCode::degenerate_metric: return "degenerate-metric";
    case ErrorCode::numeric_overflow: return "numeric-overflow";
    case ErrorCode::fit_domain: return "fit-domain";
    case ErrorCode::path: return "path";
    case ErrorCode::scan: return "scan";
    case ErrorCode::parse: return "parse";
    case ErrorCode::not_applicable: return "not-applicable";
  }
  return "unknown";
}

}  // namespace rfk
