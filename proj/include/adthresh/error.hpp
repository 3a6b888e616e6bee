#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adthresh {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  zero_norm,
  duplicate_instance_id,
  empty_gallery,
  malformed_file,
  io_failure,
  insufficient_identities,
  insufficient_samples,
  zero_variance,
  identical_distributions,
  inverted_means,
};

std::string_view to_string(ErrorCode code);

// Data-driven failures: the inputs are well-formed, but the similarity
// distributions cannot support a Gaussian threshold estimate.
bool is_degenerate(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace adthresh
