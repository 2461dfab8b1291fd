#pragma once

#include <cstdint>
#include <string>

namespace pintrack::utc {

// Parse an RFC3339 timestamp ("2017-05-01T08:30:00Z" or with a +hh:mm /
// -hh:mm offset, optional fractional seconds) to whole seconds since the
// Unix epoch. Throws Error(ParseError) on malformed input.
std::int64_t parse_rfc3339(const std::string& s);

// Format epoch seconds as "YYYY-MM-DDThh:mm:ssZ".
std::string format_rfc3339(std::int64_t epoch_s);

} // namespace pintrack::utc
