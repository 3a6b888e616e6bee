#include "adthresh/error.hpp"

namespace adthresh {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::zero_norm: return "zero_norm";
    case ErrorCode::duplicate_instance_id: return "duplicate_instance_id";
    case ErrorCode::empty_gallery: return "empty_gallery";
    case ErrorCode::malformed_file: return "malformed_file";
    case ErrorCode::io_failure: return "io_failure";
    case ErrorCode::insufficient_identities: return "insufficient_identities";
    case ErrorCode::insufficient_samples: return "insufficient_samples";
    case ErrorCode::zero_variance: return "zero_variance";
    case ErrorCode::identical_distributions: return "identical_distributions";
    case ErrorCode::inverted_means: return "inverted_means";
  }
  return "unknown";
}

bool is_degenerate(ErrorCode code) {
  switch (code) {
    case ErrorCode::insufficient_identities:
    case ErrorCode::insufficient_samples:
    case ErrorCode::zero_variance:
    case ErrorCode::identical_distributions:
    case ErrorCode::inverted_means:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace adthresh
