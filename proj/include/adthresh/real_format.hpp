#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace adthresh {

// 17 significant digits; enough to round-trip any double.
std::string format_real(double value);

// Shortest text that parses back to the same double ("0.3", not "0.29999...").
std::string format_real_short(double value);

// Strict: the whole field must be a number. Accepts inf/-inf/nan.
std::optional<double> parse_real(std::string_view text);

}  // namespace adthresh
