#include "lngp/timeutil.hpp"

#include <cstdio>

#include "lngp/common.hpp"

namespace lngp {
namespace {

// Days from 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

bool valid_date(std::int64_t y, unsigned m, unsigned d) {
  if (m < 1 || m > 12 || d < 1) return false;
  static const unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  unsigned max_d = lengths[m - 1];
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (m == 2 && leap) max_d = 29;
  return d <= max_d;
}

}  // namespace

std::int64_t parse_timestamp(const std::string& text) {
  long long y = 0;
  unsigned m = 0, d = 0, hh = 0, mm = 0, ss = 0;
  char sep = 0, tail = 0;
  int n = std::sscanf(text.c_str(), "%lld-%u-%u%c%u:%u:%u%c", &y, &m, &d, &sep,
                      &hh, &mm, &ss, &tail);
  bool have_time = false;
  if (n >= 7) {
    if (sep != 'T' && sep != ' ')
      throw ValidationError("malformed timestamp: " + text);
    if (n == 8 && tail != 'Z')
      throw ValidationError("malformed timestamp: " + text);
    have_time = true;
  } else if (n == 3) {
    have_time = false;
  } else {
    throw ValidationError("malformed timestamp: " + text);
  }
  if (!valid_date(y, m, d))
    throw ValidationError("invalid calendar date in timestamp: " + text);
  if (have_time && (hh > 23 || mm > 59 || ss > 59))
    throw ValidationError("invalid time of day in timestamp: " + text);
  return days_from_civil(y, m, d) * 86400 +
         static_cast<std::int64_t>(hh) * 3600 + mm * 60 + ss;
}

std::string format_timestamp(std::int64_t seconds) {
  std::int64_t days = seconds / 86400;
  std::int64_t rem = seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(y), m, d,
                static_cast<long long>(rem / 3600),
                static_cast<long long>((rem % 3600) / 60),
                static_cast<long long>(rem % 60));
  return buf;
}

}  // namespace lngp
