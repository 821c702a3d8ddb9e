#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "urbanflow/ingest/timezone.hpp"
#include "urbanflow/ingest/trip.hpp"

namespace urbanflow::ingest {

/// Header names of the source columns. Defaults follow the TLC
/// yellow-taxi schema.
struct ColumnMap {
  std::string pickup_time = "tpep_pickup_datetime";
  std::string dropoff_time = "tpep_dropoff_datetime";
  std::string pickup_lon = "pickup_longitude";
  std::string pickup_lat = "pickup_latitude";
  std::string dropoff_lon = "dropoff_longitude";
  std::string dropoff_lat = "dropoff_latitude";
  std::string trip_distance = "trip_distance";
  std::string passenger_count = "passenger_count";
  std::string fare_amount = "fare_amount";
  char delimiter = ',';
};

/// Missing mapped column or unreadable header. Aborts the whole parse.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParseError {
  enum class Kind { Malformed, Missing, Range };
  std::size_t line = 0;  // 1-based, header is line 1
  Kind kind = Kind::Malformed;
  std::string message;
};

struct ParseResult {
  std::vector<TripRecord> records;
  std::vector<ParseError> errors;
  std::size_t data_rows = 0;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
    if (f.size() >= 2 && f.front() == '"' && f.back() == '"') f = f.substr(1, f.size() - 2);
  }
  return out;
}

inline bool to_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size() && std::isfinite(out);
}

}  // namespace detail

/// Reads delimiter-separated trips with a header row. Bad rows are reported
/// per line and skipped; only a missing mapped column aborts. Naive
/// timestamps are interpreted as wall-clock time in `source_tz`.
inline ParseResult parse_trips(std::istream& in, const ColumnMap& schema = {},
                               const TimeZone& source_tz = TimeZone::utc()) {
  ParseResult result;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("input is empty: no header row");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // BOM
  const auto header = detail::split(line, schema.delimiter);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index.emplace(std::string(header[i]), i);

  auto column = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw SchemaError("mapped column '" + name + "' not present in header");
    return it->second;
  };
  const std::size_t c_pt = column(schema.pickup_time), c_dt = column(schema.dropoff_time),
                    c_plat = column(schema.pickup_lat), c_plon = column(schema.pickup_lon),
                    c_dlat = column(schema.dropoff_lat), c_dlon = column(schema.dropoff_lon),
                    c_dist = column(schema.trip_distance), c_pc = column(schema.passenger_count),
                    c_fare = column(schema.fare_amount);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    ++result.data_rows;
    const auto f = detail::split(line, schema.delimiter);
    auto error = [&](ParseError::Kind kind, std::string msg) {
      result.errors.push_back({line_no, kind, std::move(msg)});
    };
    if (f.size() != header.size()) {
      error(ParseError::Kind::Malformed, "expected " + std::to_string(header.size()) + " fields, got " +
                                             std::to_string(f.size()));
      continue;
    }

    TripRecord r;
    bool ok = true;
    auto time_field = [&](std::size_t c, std::int64_t& out) {
      if (!ok) return;
      if (f[c].empty()) {
        error(ParseError::Kind::Missing, "missing " + std::string(header[c]));
        ok = false;
        return;
      }
      auto t = civil::parse(f[c]);
      if (!t) {
        error(ParseError::Kind::Malformed, "bad timestamp in " + std::string(header[c]));
        ok = false;
        return;
      }
      out = source_tz.to_utc(*t);
    };
    auto num_field = [&](std::size_t c, double& out) {
      if (!ok) return;
      if (f[c].empty()) {
        error(ParseError::Kind::Missing, "missing " + std::string(header[c]));
        ok = false;
      } else if (!detail::to_double(f[c], out)) {
        error(ParseError::Kind::Malformed, "bad number in " + std::string(header[c]));
        ok = false;
      }
    };
    double passengers = 0;
    time_field(c_pt, r.pickup_time);
    time_field(c_dt, r.dropoff_time);
    num_field(c_plat, r.pickup_lat);
    num_field(c_plon, r.pickup_lon);
    num_field(c_dlat, r.dropoff_lat);
    num_field(c_dlon, r.dropoff_lon);
    num_field(c_dist, r.trip_distance);
    num_field(c_pc, passengers);
    num_field(c_fare, r.fare_amount);
    if (!ok) continue;

    auto range = [&](bool cond, const std::string& what) {
      if (ok && !cond) {
        error(ParseError::Kind::Range, what);
        ok = false;
      }
    };
    range(r.pickup_lat >= -90 && r.pickup_lat <= 90, "pickup latitude out of range");
    range(r.dropoff_lat >= -90 && r.dropoff_lat <= 90, "dropoff latitude out of range");
    range(r.pickup_lon >= -180 && r.pickup_lon <= 180, "pickup longitude out of range");
    range(r.dropoff_lon >= -180 && r.dropoff_lon <= 180, "dropoff longitude out of range");
    range(r.dropoff_time >= r.pickup_time, "dropoff before pickup");
    range(r.trip_distance >= 0, "negative trip distance");
    range(passengers >= 1 && passengers == std::floor(passengers) && passengers < 1e6,
          "passenger count must be a positive integer");
    range(r.fare_amount >= 0, "negative fare");
    if (!ok) continue;
    r.passenger_count = static_cast<int>(passengers);
    result.records.push_back(r);
  }
  return result;
}

namespace detail {
inline std::string shortest(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}
}  // namespace detail

/// Writes records in the mapped schema with wall-clock timestamps in `tz`.
/// Numbers use the shortest round-trip representation.
inline void write_trips(std::ostream& out, const std::vector<TripRecord>& records, const ColumnMap& schema = {},
                        const TimeZone& tz = TimeZone::utc()) {
  const char d = schema.delimiter;
  out << schema.pickup_time << d << schema.dropoff_time << d << schema.passenger_count << d
      << schema.trip_distance << d << schema.pickup_lon << d << schema.pickup_lat << d << schema.dropoff_lon << d
      << schema.dropoff_lat << d << schema.fare_amount << '\n';
  for (const auto& r : records) {
    out << civil::format(tz.to_local(r.pickup_time)) << d << civil::format(tz.to_local(r.dropoff_time)) << d
        << r.passenger_count << d << detail::shortest(r.trip_distance) << d << detail::shortest(r.pickup_lon) << d
        << detail::shortest(r.pickup_lat) << d << detail::shortest(r.dropoff_lon) << d
        << detail::shortest(r.dropoff_lat) << d << detail::shortest(r.fare_amount) << '\n';
  }
}

}  // namespace urbanflow::ingest
