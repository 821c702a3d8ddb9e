#pragma once

// parse -> clean -> engineer, over whole files.

#include <fstream>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "urbanflow/ingest/clean.hpp"
#include "urbanflow/ingest/features.hpp"
#include "urbanflow/ingest/parse.hpp"

namespace urbanflow::ingest {

/// Rule name under which unparseable rows are counted in a CleanReport, so
/// that rows_in covers every data row of the file.
inline constexpr const char* kParseErrorRule = "parse_error";

struct IngestResult {
  std::vector<TripRecord> cleaned;
  std::vector<ParseError> parse_errors;
  CleanReport report;
};

/// `limit` caps the number of surviving rows. When it stops the walk early
/// the report covers only the records read, and parse errors are left out
/// since their position relative to the cut is not tracked.
inline IngestResult run_ingest(std::istream& in, const ColumnMap& schema, const TimeZone& tz,
                               const CleanConfig& cfg, std::optional<std::size_t> limit = std::nullopt) {
  cfg.validate();
  auto parsed = parse_trips(in, schema, tz);
  IngestResult out;
  auto& rep = out.report;
  std::size_t used = 0;
  for (; used < parsed.records.size() && (!limit || out.cleaned.size() < *limit); ++used) {
    const auto& r = parsed.records[used];
    if (const char* why = violated_rule(r, cfg)) ++rep.dropped_by_rule[why];
    else out.cleaned.push_back(r);
  }
  rep.rows_in = used;
  if (used == parsed.records.size()) {
    out.parse_errors = std::move(parsed.errors);
    rep.rows_in += out.parse_errors.size();
    if (!out.parse_errors.empty()) rep.dropped_by_rule[kParseErrorRule] += out.parse_errors.size();
  }
  rep.rows_out = out.cleaned.size();
  return out;
}

inline nlohmann::json to_json(const CleanReport& r) {
  return {{"rows_in", r.rows_in},
          {"rows_out", r.rows_out},
          {"dropped", r.dropped()},
          {"dropped_by_rule", r.dropped_by_rule},
          {"imputed_values", r.imputed_values}};
}

inline const char* to_string(ParseError::Kind k) {
  switch (k) {
    case ParseError::Kind::Malformed: return "malformed";
    case ParseError::Kind::Missing: return "missing";
    case ParseError::Kind::Range: return "range";
  }
  return "unknown";
}

/// Engineered trips from a cleaned file. Rows that no longer parse are
/// skipped and counted in `skipped`.
inline std::vector<EngineeredTrip> load_engineered(std::istream& in, const TimeZone& tz,
                                                   const ColumnMap& schema = {}, std::size_t* skipped = nullptr) {
  auto parsed = parse_trips(in, schema, tz);
  if (skipped) *skipped = parsed.errors.size();
  return engineer_features(std::span<const TripRecord>(parsed.records), tz);
}

inline std::vector<EngineeredTrip> load_engineered(const std::string& path, const TimeZone& tz,
                                                   const ColumnMap& schema = {}, std::size_t* skipped = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_engineered(in, tz, schema, skipped);
}

}  // namespace urbanflow::ingest
