#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace urbanflow::ingest {

/// One taxi trip as read from the source file. Times are UTC epoch seconds;
/// trip_distance is in miles.
struct TripRecord {
  std::int64_t pickup_time = 0;
  std::int64_t dropoff_time = 0;
  double pickup_lat = 0, pickup_lon = 0;
  double dropoff_lat = 0, dropoff_lon = 0;
  double trip_distance = 0;
  int passenger_count = 1;
  double fare_amount = 0;

  bool operator==(const TripRecord&) const = default;
};

/// TripRecord plus the derived temporal and duration features.
struct EngineeredTrip {
  TripRecord trip;
  std::int64_t duration_sec = 0;
  int hour_of_day = 0;
  int day_of_week = 0;  // 0 = Monday
  std::array<std::uint8_t, 7> day_onehot{};

  double duration_min() const { return static_cast<double>(duration_sec) / 60.0; }

  bool operator==(const EngineeredTrip&) const = default;
};

// Civil calendar helpers on epoch seconds (proleptic Gregorian).
namespace civil {

inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct DateTime {
  std::int64_t year;
  unsigned month, day, hour, minute, second;
};

inline DateTime from_seconds(std::int64_t s) {
  std::int64_t days = s / 86400;
  std::int64_t rem = s % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  const std::int64_t z = days + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2);
  return {y, m, d, static_cast<unsigned>(rem / 3600), static_cast<unsigned>(rem % 3600 / 60),
          static_cast<unsigned>(rem % 60)};
}

inline std::int64_t to_seconds(const DateTime& t) {
  return days_from_civil(t.year, t.month, t.day) * 86400 + t.hour * 3600 + t.minute * 60 + t.second;
}

// Monday = 0.
inline int weekday(std::int64_t s) {
  std::int64_t days = s / 86400 - (s % 86400 < 0);
  return static_cast<int>(((days + 3) % 7 + 7) % 7);
}

inline int hour(std::int64_t s) {
  std::int64_t rem = s % 86400;
  if (rem < 0) rem += 86400;
  return static_cast<int>(rem / 3600);
}

// Accepts "YYYY-MM-DD HH:MM:SS" (or 'T' separator, optional fractional
// seconds which are truncated).
inline std::optional<std::int64_t> parse(std::string_view text) {
  auto num = [&](std::size_t pos, std::size_t len, unsigned& out) {
    if (pos + len > text.size()) return false;
    const auto* first = text.data() + pos;
    auto [p, ec] = std::from_chars(first, first + len, out);
    return ec == std::errc{} && p == first + len;
  };
  if (text.size() < 19) return std::nullopt;
  unsigned y, mo, d, h, mi, s;
  if (!num(0, 4, y) || text[4] != '-' || !num(5, 2, mo) || text[7] != '-' || !num(8, 2, d) ||
      (text[10] != ' ' && text[10] != 'T') || !num(11, 2, h) || text[13] != ':' || !num(14, 2, mi) ||
      text[16] != ':' || !num(17, 2, s))
    return std::nullopt;
  if (text.size() > 19 && text[19] != '.') return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || h > 23 || mi > 59 || s > 60) return std::nullopt;
  static constexpr unsigned kDays[] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (d > kDays[mo - 1] || (mo == 2 && d == 29 && !leap)) return std::nullopt;
  return to_seconds({y, mo, d, h, mi, s});
}

inline std::string format(std::int64_t s) {
  const auto t = from_seconds(s);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u %02u:%02u:%02u", static_cast<long long>(t.year), t.month,
                t.day, t.hour, t.minute, t.second);
  return buf;
}

}  // namespace civil
}  // namespace urbanflow::ingest
