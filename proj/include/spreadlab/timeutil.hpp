#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace spreadlab {

// Civil/epoch conversions after Howard Hinnant's date algorithms.
inline int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);             // [0, 399]
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;   // [0, 365]
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;            // [0, 146096]
  return static_cast<int64_t>(era) * 146097 + static_cast<int64_t>(doe) - 719468;
}

inline void civil_from_days(int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t yy = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yy + (m <= 2));
}

/// Parses an RFC3339 timestamp ("2023-05-23T16:38:45.563Z" or with a
/// +hh:mm / -hh:mm offset) into UTC epoch milliseconds.
inline int64_t parse_rfc3339_ms(std::string_view s) {
  auto fail = [&] { throw ParseError("bad RFC3339 timestamp '" + std::string(s) + "'"); };
  auto digit = [&](size_t i) -> int {
    if (i >= s.size() || s[i] < '0' || s[i] > '9') fail();
    return s[i] - '0';
  };
  auto num2 = [&](size_t i) { return digit(i) * 10 + digit(i + 1); };

  if (s.size() < 20) fail();
  int year = digit(0) * 1000 + digit(1) * 100 + digit(2) * 10 + digit(3);
  if (s[4] != '-' || s[7] != '-') fail();
  unsigned month = num2(5), day = num2(8);
  if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') fail();
  int hour = num2(11), minute = num2(14), second = num2(17);
  if (s[13] != ':' || s[16] != ':') fail();
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60)
    fail();

  size_t i = 19;
  int64_t ms = 0;
  if (i < s.size() && s[i] == '.') {
    ++i;
    int scale = 100;
    size_t start = i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
      if (scale > 0) ms += (s[i] - '0') * scale;  // beyond millis: truncated
      scale /= 10;
      ++i;
    }
    if (i == start) fail();
  }

  int64_t offset_s = 0;
  if (i >= s.size()) fail();
  if (s[i] == 'Z' || s[i] == 'z') {
    ++i;
  } else if (s[i] == '+' || s[i] == '-') {
    int sign = s[i] == '-' ? -1 : 1;
    int oh = num2(i + 1);
    if (i + 3 >= s.size() || s[i + 3] != ':') fail();
    int om = num2(i + 4);
    offset_s = sign * (oh * 3600 + om * 60);
    i += 6;
  } else {
    fail();
  }
  if (i != s.size()) fail();

  int64_t days = days_from_civil(year, month, day);
  int64_t epoch_s = days * 86400 + hour * 3600 + minute * 60 + second - offset_s;
  return epoch_s * 1000 + ms;
}

/// Epoch seconds of the minute containing the instant.
inline int64_t truncate_minute_s(int64_t epoch_ms) {
  int64_t s = epoch_ms / 1000;
  if (epoch_ms < 0 && epoch_ms % 1000 != 0) --s;
  int64_t m = s / 60;
  if (s < 0 && s % 60 != 0) --m;
  return m * 60;
}

/// Epoch seconds of the nearest minute boundary; 30.000s rounds up.
inline int64_t round_minute_s(int64_t epoch_ms) {
  int64_t base = truncate_minute_s(epoch_ms);
  return (epoch_ms - base * 1000) >= 30000 ? base + 60 : base;
}

inline std::string format_rfc3339_minute(int64_t minute_s) {
  int y;
  unsigned mo, d;
  int64_t days = minute_s / 86400;
  int64_t rem = minute_s - days * 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  civil_from_days(days, y, mo, d);
  int hh = static_cast<int>(rem / 3600);
  int mm = static_cast<int>((rem % 3600) / 60);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:00Z", y, mo, d, hh, mm);
  return buf;
}

inline std::string format_date(int64_t day_index) {
  int y;
  unsigned mo, d;
  civil_from_days(day_index, y, mo, d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, mo, d);
  return buf;
}

/// UTC day index (days since epoch) of an epoch-seconds instant.
inline int64_t day_of(int64_t epoch_s) {
  int64_t d = epoch_s / 86400;
  if (epoch_s < 0 && epoch_s % 86400 != 0) --d;
  return d;
}

}  // namespace spreadlab
