#pragma once

#include <cstdint>
#include <string>

namespace lngp {

// Timestamps are held internally as seconds since the Unix epoch (UTC).
// Only the formats produced/accepted here are supported:
//   "YYYY-MM-DDTHH:MM:SS"  (optional trailing 'Z')
//   "YYYY-MM-DD HH:MM:SS"
//   "YYYY-MM-DD"           (midnight)

// Parse a timestamp string; throws ValidationError on malformed input.
std::int64_t parse_timestamp(const std::string& text);

// Render seconds-since-epoch as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(std::int64_t seconds);

}  // namespace lngp
