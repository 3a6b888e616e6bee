#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace adthresh::csv {

// RFC 4180 records: quoted fields may hold commas, quotes and line breaks.
// Blank lines are skipped; CRLF is accepted. Throws malformed_file on an
// unterminated quote.
std::vector<std::vector<std::string>> parse(std::string_view text);

// Quotes only when needed.
std::string escape(std::string_view field);

}  // namespace adthresh::csv
