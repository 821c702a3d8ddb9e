#pragma once

// Shared inputs for the suites: cleaned synthetic trips and fixture paths.

#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "urbanflow/ingest/pipeline.hpp"
#include "urbanflow/ingest/synthetic.hpp"

namespace fixture {

inline std::string data_path(const std::string& name) { return std::string(URBANFLOW_DATA_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Synthetic month of New York trips, cleaned with the default bounds.
inline std::vector<urbanflow::ingest::EngineeredTrip> trips(std::size_t rows, std::uint64_t seed = 2015) {
  using namespace urbanflow::ingest;
  SyntheticConfig cfg;
  cfg.rows = rows;
  cfg.seed = seed;
  const auto tz = TimeZone::load("America/New_York");
  std::istringstream in(generate_synthetic_trips(cfg));
  const auto res = run_ingest(in, {}, tz, {});
  return engineer_features(std::span<const TripRecord>(res.cleaned), tz);
}

}  // namespace fixture
