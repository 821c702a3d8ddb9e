#pragma once

// Subcommand bodies for the urbanflow tool. Each takes its parsed options
// and returns an exit code: 0 success, 1 runtime failure, 2 usage or
// configuration error. Human-readable progress goes to `out`; files are
// machine-readable and depend only on the inputs and the seed.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "urbanflow/ingest/pipeline.hpp"
#include "urbanflow/ingest/synthetic.hpp"
#include "urbanflow/ml/congestion.hpp"
#include "urbanflow/ml/duration.hpp"
#include "urbanflow/ml/model_file.hpp"
#include "urbanflow/realtime/scenario.hpp"
#include "urbanflow/realtime/simulator.hpp"
#include "urbanflow/routing/generate.hpp"
#include "urbanflow/routing/route.hpp"
#include "urbanflow/service/config.hpp"
#include "urbanflow/service/server.hpp"
#include "urbanflow/spatiotemporal/aggregate.hpp"
#include "urbanflow/spatiotemporal/heatmap.hpp"
#include "urbanflow/spatiotemporal/kde.hpp"

namespace urbanflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Bad flags, missing inputs, unreadable configuration.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kDefaultTimezone = "America/New_York";

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << bytes;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void require_file(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw UsageError("input file not found: " + path);
}

inline ingest::TimeZone timezone(const std::string& name) {
  try {
    return ingest::TimeZone::load(name);
  } catch (const ingest::TimeZoneError& e) {
    throw UsageError(e.what());
  }
}

inline std::vector<ingest::EngineeredTrip> load_trips(const std::string& path, const ingest::TimeZone& tz,
                                                      std::ostream& out) {
  require_file(path);
  std::size_t skipped = 0;
  auto trips = ingest::load_engineered(path, tz, {}, &skipped);
  out << "loaded " << trips.size() << " trips from " << path;
  if (skipped) out << " (" << skipped << " unparseable rows skipped)";
  out << '\n';
  if (trips.empty()) throw std::runtime_error(path + ": no usable trips");
  return trips;
}

inline spatiotemporal::GridSpec grid_spec(const std::string& size) {
  spatiotemporal::GridSpec g;
  try {
    std::tie(g.rows, g.cols) = spatiotemporal::parse_grid_size(size);
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return g;
}

inline routing::LatLon parse_latlon(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("expected lat,lon but got '" + text + "'");
  routing::LatLon p;
  try {
    std::size_t a = 0, b = 0;
    const auto lat = text.substr(0, comma), lon = text.substr(comma + 1);
    p.lat = std::stod(lat, &a);
    p.lon = std::stod(lon, &b);
    if (a != lat.size() || b != lon.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw UsageError("expected lat,lon but got '" + text + "'");
  }
  if (!routing::valid(p)) throw UsageError("coordinate out of range: " + text);
  return p;
}

inline routing::RoadGraph load_graph(const std::string& path) {
  require_file(path);
  try {
    return routing::load_graph(read_file(path));
  } catch (const routing::GraphError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

inline realtime::Scenario load_scenario(const std::string& path) {
  require_file(path);
  try {
    return realtime::parse_scenario(read_file(path));
  } catch (const realtime::ScenarioError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

inline std::string fixed(double v, int digits = 3) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct IngestOptions {
  std::string input;
  std::string out;
  std::string report;
  std::string timezone = kDefaultTimezone;
  std::optional<std::size_t> limit;
  ingest::CleanConfig clean;
};

inline int cmd_ingest(const IngestOptions& o, std::ostream& out) {
  detail::require_file(o.input);
  const auto tz = detail::timezone(o.timezone);
  try {
    o.clean.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::ifstream in(o.input, std::ios::binary);
  if (!in) throw UsageError("cannot open " + o.input);
  ingest::IngestResult res;
  try {
    res = ingest::run_ingest(in, {}, tz, o.clean, o.limit);
  } catch (const ingest::SchemaError& e) {
    throw UsageError(o.input + ": " + e.what());
  }
  std::ostringstream csv;
  ingest::write_trips(csv, res.cleaned, {}, tz);
  detail::write_file(o.out, csv.str());

  auto report = ingest::to_json(res.report);
  report["input"] = o.input;
  report["timezone"] = o.timezone;
  nlohmann::json errors = nlohmann::json::array();
  for (std::size_t i = 0; i < res.parse_errors.size() && i < 50; ++i) {
    const auto& e = res.parse_errors[i];
    errors.push_back({{"line", e.line}, {"kind", ingest::to_string(e.kind)}, {"message", e.message}});
  }
  report["parse_errors"] = errors;
  detail::write_file(o.report, report.dump(2) + "\n");

  out << "rows in: " << res.report.rows_in << ", kept: " << res.report.rows_out << ", dropped: "
      << res.report.dropped() << '\n';
  for (const auto& [rule, n] : res.report.dropped_by_rule) out << "  " << rule << ": " << n << '\n';
  out << "wrote " << o.out << " and " << o.report << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct TrainDurationOptions {
  std::string data;
  double split = 0.8;
  std::uint64_t seed = 42;
  std::string out;
  std::string metrics;
  bool temporal = false;
  std::string timezone = kDefaultTimezone;
};

inline nlohmann::json metrics_json(const ml::DurationTraining& t) {
  return {{"mae", t.test.mae},
          {"rmse", t.test.rmse},
          {"m", t.test.m},
          {"unit", "minutes"},
          {"baseline_rmse", t.baseline_rmse},
          {"train_rows", t.train_rows},
          {"test_rows", t.test_rows},
          {"seed", t.file.meta.seed},
          {"feature_names", t.file.meta.feature_names},
          {"ridge_epsilon", std::get<ml::LinRegModel>(t.file.model).ridge_epsilon}};
}

inline int cmd_train_duration(const TrainDurationOptions& o, std::ostream& out) {
  if (!(o.split > 0 && o.split < 1)) throw UsageError("--split must lie in (0, 1)");
  const auto tz = detail::timezone(o.timezone);
  const auto trips = detail::load_trips(o.data, tz, out);
  const auto t = ml::train_duration(trips, o.split, o.seed, o.temporal);
  detail::write_file(o.out, ml::save_model(t.file));
  detail::write_file(o.metrics, metrics_json(t).dump(2) + "\n");
  out << "trained on " << t.train_rows << " trips, evaluated on " << t.test_rows << '\n';
  out << "test MAE " << detail::fixed(t.test.mae) << " min, RMSE " << detail::fixed(t.test.rmse)
      << " min (mean-predictor RMSE " << detail::fixed(t.baseline_rmse) << ")\n";
  out << "wrote " << o.out << " and " << o.metrics << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct TrainCongestionOptions {
  std::string data;
  std::size_t k = ml::kDefaultRegimes;
  std::uint64_t seed = 42;
  std::string out;
  std::optional<std::string> elbow;
  std::size_t elbow_max = 10;
  int restarts = 10;
  std::string grid = "40x40";
  std::size_t min_support = spatiotemporal::kDefaultMinSupport;
  std::string timezone = kDefaultTimezone;
};

inline int cmd_train_congestion(const TrainCongestionOptions& o, std::ostream& out) {
  if (o.k == 0) throw UsageError("--k must be positive");
  const auto grid = detail::grid_spec(o.grid);
  const auto tz = detail::timezone(o.timezone);
  const auto trips = detail::load_trips(o.data, tz, out);
  const auto agg = spatiotemporal::aggregate_spatial(trips, grid, {}, o.min_support);
  if (agg.cells.empty()) throw std::runtime_error("no cell-bin reaches the minimum support of " +
                                                  std::to_string(o.min_support) + " trips");
  ml::KMeansOptions kopt;
  kopt.seed = o.seed;
  const auto regimes = ml::cluster_congestion(agg.cells, o.k, kopt);

  ml::ModelFile mf;
  mf.model = regimes.model;
  mf.meta.seed = o.seed;
  mf.meta.feature_names = ml::congestion_feature_names();
  mf.meta.norm = regimes.norm;
  mf.meta.target = "congestion_regime";
  mf.meta.extra["grid"] = o.grid;
  mf.meta.extra["min_support"] = std::to_string(o.min_support);
  mf.meta.extra["cells"] = std::to_string(agg.cells.size());
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& r : regimes.regimes)
    summary.push_back({{"regime", r.regime},
                       {"cells", r.cells},
                       {"mean_congestion", r.mean_congestion},
                       {"dominant_hours", r.dominant_hours}});
  mf.meta.extra["regimes"] = summary.dump();
  detail::write_file(o.out, ml::save_model(mf));

  out << "clustered " << agg.cells.size() << " cell-bins into " << o.k << " regimes (inertia "
      << detail::fixed(regimes.model.inertia, 6) << ")\n";
  for (const auto& r : regimes.regimes) {
    out << "  regime " << r.regime << ": " << r.cells << " cells, mean " << detail::fixed(r.mean_congestion)
        << " min/mi, hours";
    for (int h : r.dominant_hours) out << ' ' << h;
    out << '\n';
  }
  if (o.elbow) {
    const auto rows = ml::congestion_rows(agg.cells);
    const auto pts = ml::normalized_congestion_points(rows, regimes.norm);
    const auto curve = ml::elbow_curve(pts, o.elbow_max, kopt, o.restarts);
    std::ostringstream csv;
    csv << "k,inertia\n";
    for (const auto& r : curve) csv << r.k << ',' << ingest::detail::shortest(r.inertia) << '\n';
    detail::write_file(*o.elbow, csv.str());
    out << "wrote elbow table " << *o.elbow << '\n';
  }
  out << "wrote " << o.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct HeatmapOptions {
  std::string data;
  std::optional<int> day;
  std::optional<int> hour;
  std::string grid = "40x40";
  std::string out;
  std::optional<std::string> format;  // default from the output extension
  std::string kind = "congestion";    // congestion | density
  double bandwidth_m = spatiotemporal::kDefaultBandwidthM;
  std::size_t min_support = spatiotemporal::kDefaultMinSupport;
  std::string timezone = kDefaultTimezone;
};

inline int cmd_heatmap(const HeatmapOptions& o, std::ostream& out) {
  if (o.day && (*o.day < 0 || *o.day > 6)) throw UsageError("--day must lie in [0, 6]");
  if (o.hour && (*o.hour < 0 || *o.hour > 23)) throw UsageError("--hour must lie in [0, 23]");
  if (o.kind != "congestion" && o.kind != "density") throw UsageError("--kind must be congestion or density");
  const auto grid = detail::grid_spec(o.grid);
  spatiotemporal::ExportFormat format;
  try {
    std::string tag = o.format.value_or("");
    if (tag.empty()) tag = std::filesystem::path(o.out).extension() == ".geojson" ? "geojson" : "grid";
    format = spatiotemporal::parse_export_format(tag);
  } catch (const spatiotemporal::HeatmapError& e) {
    throw UsageError(e.what());
  }
  const auto tz = detail::timezone(o.timezone);
  const auto trips = detail::load_trips(o.data, tz, out);
  const spatiotemporal::BinFilter filter{o.day, o.hour};

  spatiotemporal::Heatmap hm;
  if (o.kind == "congestion") {
    const auto agg = spatiotemporal::aggregate_spatial(trips, grid, filter, o.min_support);
    if (o.day && o.hour) {
      hm = spatiotemporal::build_heatmap(agg.cells, grid, filter);
    } else {
      // Several bins per cell: pool them into one trip-weighted index.
      std::vector<double> sum(grid.cell_count(), 0.0), weight(grid.cell_count(), 0.0);
      for (const auto& c : agg.cells) {
        sum[grid.flat(c.cell)] += c.congestion_index * static_cast<double>(c.trip_count);
        weight[grid.flat(c.cell)] += static_cast<double>(c.trip_count);
      }
      std::vector<spatiotemporal::CongestionCell> pooled;
      for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c) {
          const auto i = grid.flat({r, c});
          if (weight[i] > 0)
            pooled.push_back({{r, c}, {}, static_cast<std::size_t>(weight[i]), sum[i] / weight[i]});
        }
      hm = spatiotemporal::build_heatmap(pooled, grid, filter);
    }
  } else {
    std::vector<spatiotemporal::LatLon> pts;
    for (const auto& t : trips)
      if (filter.matches(t.day_of_week, t.hour_of_day) && grid.cell_of(t.trip.pickup_lat, t.trip.pickup_lon))
        pts.push_back({t.trip.pickup_lat, t.trip.pickup_lon});
    if (pts.empty()) throw std::runtime_error("no pickups match the requested bin");
    hm = spatiotemporal::kde(pts, o.bandwidth_m, grid);
    hm.filter = filter;
  }
  detail::write_file(o.out, spatiotemporal::export_heatmap(hm, format));
  out << "heatmap (" << spatiotemporal::to_string(hm.kind) << ") with " << hm.populated() << " populated cells of "
      << grid.cell_count() << "; wrote " << o.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct AnalyzeTemporalOptions {
  std::string data;
  std::string out;
  double top_q = service::kDefaultPeakTopQ;
  bool fill = false;  // add interpolated rows for empty bins
  std::string timezone = kDefaultTimezone;
};

/// bins.csv columns: day,hour,trip_count,congestion_index,peak[,imputed].
/// Without --fill only bins with an index are written.
inline std::string temporal_csv(const spatiotemporal::TemporalAggregation& agg, double top_q, bool fill,
                                std::size_t* imputed = nullptr) {
  using spatiotemporal::TimeBin;
  const auto peaks = spatiotemporal::peak_periods(agg, top_q);
  std::vector<bool> is_peak(spatiotemporal::kTimeBins, false);
  for (const auto& p : peaks) is_peak[static_cast<std::size_t>(p.index())] = true;

  std::vector<std::optional<double>> series(agg.index.begin(), agg.index.end());
  std::vector<double> filled;
  if (fill) filled = ingest::impute_missing(series, imputed);

  std::ostringstream csv;
  csv << "day,hour,trip_count,congestion_index,peak" << (fill ? ",imputed" : "") << '\n';
  for (int b = 0; b < spatiotemporal::kTimeBins; ++b) {
    const auto i = static_cast<std::size_t>(b);
    if (!fill && !series[i]) continue;
    const auto bin = TimeBin::from_index(b);
    const double v = series[i] ? *series[i] : filled[i];
    csv << bin.day_of_week << ',' << bin.hour << ',' << agg.counts[i] << ',' << ingest::detail::shortest(v) << ','
        << (is_peak[i] ? 1 : 0);
    if (fill) csv << ',' << (series[i] ? 0 : 1);
    csv << '\n';
  }
  return csv.str();
}

inline int cmd_analyze_temporal(const AnalyzeTemporalOptions& o, std::ostream& out) {
  if (!(o.top_q > 0 && o.top_q <= 1)) throw UsageError("--top must lie in (0, 1]");
  const auto tz = detail::timezone(o.timezone);
  const auto trips = detail::load_trips(o.data, tz, out);
  const auto agg = spatiotemporal::aggregate_temporal(trips);
  std::size_t imputed = 0;
  std::string csv;
  try {
    csv = temporal_csv(agg, o.top_q, o.fill, &imputed);
  } catch (const ingest::ImputeError& e) {
    throw std::runtime_error(std::string("--fill: ") + e.what());
  }
  detail::write_file(o.out, csv);
  static const char* kDays[] = {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};
  out << "peak bins (top " << o.top_q * 100 << "%):";
  for (const auto& p : spatiotemporal::peak_periods(agg, o.top_q))
    out << ' ' << kDays[p.day_of_week] << ' ' << std::setw(2) << std::setfill('0') << p.hour << ":00"
        << std::setfill(' ');
  out << '\n';
  if (o.fill) out << imputed << " empty bins filled by interpolation\n";
  out << "wrote " << o.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RouteOptions {
  std::string graph;
  std::string from;
  std::string to;
  std::optional<std::string> scenario;
  double at = 0;  // scenario time whose snapshot is used
  bool json = false;
};

/// Snapshot after every scenario event with t <= at, applied as one batch.
inline routing::SnapshotPtr scenario_snapshot(const realtime::Scenario& s, const routing::RoadGraph& g, double at) {
  std::vector<realtime::TrafficUpdate> batch;
  for (const auto& e : realtime::timeline(s, g))
    if (e.t <= at) batch.push_back({e.edge, e.factor, e.t});
  if (batch.empty()) return routing::free_flow_snapshot();
  return realtime::apply_updates(*routing::free_flow_snapshot(), batch).snapshot;
}

inline int cmd_route(const RouteOptions& o, std::ostream& out) {
  const auto origin = detail::parse_latlon(o.from);
  const auto dest = detail::parse_latlon(o.to);
  if (!std::isfinite(o.at) || o.at < 0) throw UsageError("--at must be a nonnegative time");
  const auto graph = detail::load_graph(o.graph);
  auto snap = routing::free_flow_snapshot();
  if (o.scenario) snap = scenario_snapshot(detail::load_scenario(*o.scenario), graph, o.at);
  const auto h = routing::HeuristicSpec::haversine_for(graph);
  const auto r = routing::compute_route(origin, dest, graph, *snap, h);
  if (o.json) {
    nlohmann::json j{{"found", r.route.found},
                     {"cost_sec", r.route.cost_sec},
                     {"distance_m", r.route.distance_m},
                     {"crow_flight_m", r.crow_flight_m},
                     {"snapshot_version", r.route.snapshot_version},
                     {"origin_node", r.origin_node},
                     {"dest_node", r.dest_node},
                     {"nodes", r.route.nodes},
                     {"edges", r.route.edges}};
    out << j.dump() << '\n';
  } else {
    out << "crow-flight distance: " << detail::fixed(r.crow_flight_m, 1) << " m\n";
    out << "snapped: node " << r.origin_node << " (" << detail::fixed(r.origin_snap_m, 1) << " m) -> node "
        << r.dest_node << " (" << detail::fixed(r.dest_snap_m, 1) << " m)\n";
    if (!r.route.found) {
      out << "no route\n";
    } else {
      out << "travel time: " << detail::fixed(r.route.cost_sec, 1) << " s, distance: "
          << detail::fixed(r.route.distance_m, 1) << " m, " << r.route.edges.size() << " edges\n";
      out << "nodes:";
      for (auto n : r.route.nodes) out << ' ' << n;
      out << '\n';
    }
  }
  return r.route.found ? kExitOk : kExitRuntime;
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string graph;
  std::string scenario;
  std::string trips;
  std::string out;
  double threshold = realtime::kDefaultThreshold;
  std::size_t max_ticks = realtime::kDefaultMaxTicks;
};

inline int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  if (!(o.threshold > 0)) throw UsageError("--threshold must be positive");
  const auto graph = detail::load_graph(o.graph);
  const auto scenario = detail::load_scenario(o.scenario);
  detail::require_file(o.trips);
  std::vector<realtime::TripRequest> trips;
  try {
    std::istringstream in(detail::read_file(o.trips));
    trips = realtime::parse_trips(in);
  } catch (const realtime::ScenarioError& e) {
    throw UsageError(o.trips + ": " + e.what());
  }
  const auto h = routing::HeuristicSpec::haversine_for(graph);
  realtime::PairedRun paired;
  try {
    paired = realtime::simulate_paired(graph, scenario, trips, o.threshold, h, o.max_ticks);
  } catch (const realtime::ScenarioError& e) {
    throw UsageError(e.what());
  }
  detail::write_file(o.out, realtime::to_json(paired, o.threshold).dump(2) + "\n");
  for (const auto& t : paired.trips) {
    out << t.id << ": ";
    if (t.rerouted && t.baseline)
      out << "realized " << detail::fixed(*t.rerouted, 1) << " s with rerouting, " << detail::fixed(*t.baseline, 1)
          << " s without\n";
    else
      out << "did not complete\n";
  }
  out << "total " << detail::fixed(paired.total_rerouted, 1) << " s vs " << detail::fixed(paired.total_baseline, 1)
      << " s (ratio " << detail::fixed(paired.ratio(), 4) << ", improvement "
      << detail::fixed(100 * (1 - paired.ratio()), 1) << "%)\n";
  out << "wrote " << o.out << '\n';
  if (!paired.rerouted.completed || !paired.baseline.completed)
    out << "warning: tick limit reached before all trips finished\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ServeOptions {
  std::string config;
  std::optional<int> port;  // overrides the config file
};

/// Loads the configuration, binds, prints the address and serves until the
/// process is stopped. `on_bound` is for tests that need the server handle.
inline int cmd_serve(const ServeOptions& o, std::ostream& out,
                     const std::function<void(service::Server&)>& on_bound = {}) {
  service::ServiceConfig cfg;
  try {
    cfg = service::load_service_config(o.config);
  } catch (const service::ConfigError& e) {
    throw UsageError(o.config + ": " + e.what());
  }
  if (o.port) cfg.port = *o.port;
  std::shared_ptr<const service::ServiceState> state;
  try {
    state = std::make_shared<const service::ServiceState>(service::load_state(cfg));
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("failed to load service artifacts: ") + e.what());
  }
  service::Server server(state);
  const int port = server.bind(cfg.host, cfg.port);
  if (port < 0) throw std::runtime_error("cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
  out << "listening on http://" << cfg.host << ':' << port << std::endl;
  if (on_bound) on_bound(server);
  return server.serve() ? kExitOk : kExitRuntime;
}

// ---------------------------------------------------------------------------

struct GenGraphOptions {
  std::string kind = "grid";  // grid | random
  int rows = 10, cols = 10;
  double spacing_m = 200;
  double speed_mps = 10;
  std::size_t nodes = 200;
  std::uint64_t seed = 1;
  std::string out;
};

inline int cmd_gen_graph(const GenGraphOptions& o, std::ostream& out) {
  routing::RoadGraph g;
  if (o.kind == "grid") {
    if (o.rows < 1 || o.cols < 1) throw UsageError("--rows and --cols must be positive");
    routing::GridGraphSpec spec;
    spec.rows = o.rows;
    spec.cols = o.cols;
    spec.spacing_m = o.spacing_m;
    spec.speed_mps = o.speed_mps;
    g = routing::grid_graph(spec);
  } else if (o.kind == "random") {
    if (o.nodes < 2) throw UsageError("--nodes must be at least 2");
    routing::RandomGraphSpec spec;
    spec.nodes = o.nodes;
    spec.seed = o.seed;
    g = routing::random_graph(spec);
  } else {
    throw UsageError("--kind must be grid or random");
  }
  std::ostringstream ss;
  routing::write_graph(ss, g);
  detail::write_file(o.out, ss.str());
  out << "wrote " << g.node_count() << " nodes and " << g.edge_count() << " edges to " << o.out << '\n';
  return kExitOk;
}

struct SynthTripsOptions {
  ingest::SyntheticConfig synth;
  std::string out;
};

inline int cmd_synth_trips(const SynthTripsOptions& o, std::ostream& out) {
  if (!(o.synth.dirty_fraction >= 0 && o.synth.dirty_fraction <= 1))
    throw UsageError("--dirty must lie in [0, 1]");
  detail::write_file(o.out, ingest::generate_synthetic_trips(o.synth));
  out << "wrote " << o.synth.rows << " synthetic trips to " << o.out << '\n';
  return kExitOk;
}

}  // namespace urbanflow::cli
