// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   acceptance                       A1-A7, A10, A11 (A8/A9 too if a sample is given)
//   acceptance --real-data <csv>     also A8/A9 on a TLC yellow-taxi monthly file
//   acceptance --real-data-only      A8/A9 only; exit 77 when no sample is available
//
// URBANFLOW_NYC_SAMPLE stands in for --real-data.

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "urbanflow/ml/duration.hpp"
#include "urbanflow/ml/kmeans.hpp"
#include "urbanflow/ml/linreg.hpp"
#include "urbanflow/ml/metrics.hpp"
#include "urbanflow/ml/model_file.hpp"
#include "urbanflow/realtime/scenario.hpp"
#include "urbanflow/realtime/simulator.hpp"
#include "urbanflow/rng.hpp"
#include "urbanflow/routing/generate.hpp"
#include "urbanflow/routing/search.hpp"
#include "urbanflow/spatiotemporal/aggregate.hpp"
#include "urbanflow/spatiotemporal/kde.hpp"

using namespace urbanflow;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Collects failures for one criterion; keeps the first few messages.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (notes_.size() < 3) notes_.push_back(what);
  }
  bool ok() const { return failures_ == 0; }
  std::string summary() const {
    std::ostringstream s;
    s << checks_ << " checks";
    if (failures_) {
      s << ", " << failures_ << " failed:";
      for (const auto& n : notes_) s << " [" << n << "]";
    }
    return s.str();
  }

 private:
  std::size_t checks_ = 0, failures_ = 0;
  std::vector<std::string> notes_;
};

int g_failed = 0;

void report(const char* id, const Check& c, const std::string& detail) {
  std::cout << id << ' ' << (c.ok() ? "PASS" : "FAIL") << "  " << detail << " (" << c.summary() << ")"
            << std::endl;
  g_failed += !c.ok();
}

std::string num(double v, int prec = 6) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// ---------------------------------------------------------------------------

void a1_haversine() {
  Check c;
  const double half = routing::haversine({0, 0}, {0, 180});
  const double want = std::numbers::pi * routing::kEarthRadiusM;
  c.expect(std::abs(half - want) <= 1e-9 * want, "(0,0)-(0,180) = " + num(half, 17));
  const routing::LatLon times_sq{40.7580, -73.9855}, wall_st{40.7060, -74.0088};
  const double d = routing::haversine(times_sq, wall_st);
  const double o = oracle::great_circle_m(times_sq.lat, times_sq.lon, wall_st.lat, wall_st.lon);
  c.expect(std::abs(d - o) <= 1e-3 * o, "Times Square-Wall Street " + num(d) + " vs " + num(o));
  report("A1", c, "half circumference " + num(half, 12) + " m; Times Sq-Wall St " + num(d, 7) + " m vs oracle " +
                      num(o, 7) + " m");
}

routing::TrafficSnapshot random_snapshot(const routing::RoadGraph& g, Rng& rng) {
  routing::TrafficSnapshot s;
  s.version = 1;
  for (const auto& e : g.edges())
    if (rng.uniform01() < 0.3) s.speed_factor[e.id] = rng.uniform(0.2, 1.0);
  return s;
}

void a2_a3_search() {
  Check c2, c3;
  const auto t0 = Clock::now();
  std::size_t queries = 0, found = 0, settled_a = 0, settled_d = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(seed * 7919);
    routing::RandomGraphSpec spec;
    spec.nodes = 50 + rng.below(451);  // 50..500
    spec.seed = seed;
    const auto g = routing::random_graph(spec);
    const auto h = routing::HeuristicSpec::haversine_for(g);
    const auto snap = seed % 2 ? random_snapshot(g, rng) : routing::TrafficSnapshot{};
    for (int q = 0; q < 50; ++q, ++queries) {
      const auto si = static_cast<routing::NodeIndex>(rng.below(g.node_count()));
      const auto ti = static_cast<routing::NodeIndex>(rng.below(g.node_count()));
      const auto s = g.node(si).id, t = g.node(ti).id;
      const auto d = routing::dijkstra(g, snap, s, t);
      const auto a = routing::astar(g, snap, s, t, h);
      const std::string at = "graph " + std::to_string(seed) + " query " + std::to_string(q);
      c2.expect(a.found == d.found, at + ": found differs");
      c2.expect(a.found == false || a.cost_sec == d.cost_sec,
                at + ": " + num(a.cost_sec, 17) + " vs " + num(d.cost_sec, 17));
      c2.expect(a.settled <= d.settled, at + ": A* settled " + std::to_string(a.settled) + " > " +
                                            std::to_string(d.settled));
      settled_a += a.settled;
      settled_d += d.settled;

      const double bf = oracle::bellman_ford(g, snap, si)[ti];
      if (std::isinf(bf)) {
        c3.expect(!d.found, at + ": Dijkstra found a route Bellman-Ford cannot");
      } else {
        ++found;
        c3.expect(d.found && d.cost_sec == bf, at + ": " + num(d.cost_sec, 17) + " vs " + num(bf, 17));
      }
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c2.expect(secs < 30, "runtime " + num(secs) + " s");
  report("A2", c2, std::to_string(queries) + " queries on 100 graphs; settled A* " + std::to_string(settled_a) +
                       " vs Dijkstra " + std::to_string(settled_d) + "; " + num(secs, 3) + " s");
  report("A3", c3, std::to_string(found) + " reachable queries equal Bellman-Ford exactly");
}

// ---------------------------------------------------------------------------

oracle::Rows blobs(Rng& rng, std::size_t n, std::size_t dim, std::size_t centres) {
  oracle::Rows c(centres, std::vector<double>(dim));
  for (auto& row : c)
    for (auto& v : row) v = rng.uniform(-20, 20);
  oracle::Rows r;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = c[rng.below(centres)];
    std::vector<double> p(dim);
    for (std::size_t j = 0; j < dim; ++j) p[j] = rng.normal(m[j], 2.0);
    r.push_back(p);
  }
  return r;
}

oracle::Rows to_rows(const ml::Points& p) {
  oracle::Rows r;
  for (std::size_t i = 0; i < p.size(); ++i) r.emplace_back(p[i].begin(), p[i].end());
  return r;
}

void a4_kmeans() {
  Check c;
  std::size_t iterations = 0, move_checks = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed + 424242);
    const auto rows = blobs(rng, 10 + rng.below(191), 2 + rng.below(3), 1 + rng.below(6));
    const auto pts = ml::Points::from_rows(rows);
    const std::size_t k = 1 + rng.below(std::min<std::size_t>(8, rows.size()));
    const std::string at = "seed " + std::to_string(seed);

    // Monotone objective; the trace is recomputed from scratch each step, so
    // allow one ulp-scale wobble.
    ml::KMeansOptions opt;
    opt.seed = seed;
    opt.tol = std::numeric_limits<double>::denorm_min();
    opt.max_iter = 10000;
    ml::LloydTrace trace;
    const auto m = ml::kmeans_fit(pts, k, opt, &trace);
    iterations += static_cast<std::size_t>(m.iterations);
    for (std::size_t i = 1; i < trace.objective.size(); ++i)
      c.expect(trace.objective[i] <= trace.objective[i - 1] * (1 + 1e-12), at + " step " + std::to_string(i));
    c.expect(m.iterations < opt.max_iter, at + ": did not converge");

    // No single point is better off in another cluster.
    const auto cents = to_rows(m.centroids);
    auto lab = oracle::assign(rows, cents);
    const double base = oracle::objective(rows, lab, cents);
    c.expect(rel(base, m.inertia) <= 1e-12, at + ": inertia " + num(m.inertia, 17) + " vs " + num(base, 17));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto own = lab[i];
      for (std::size_t cl = 0; cl < k; ++cl) {
        if (cl == own) continue;
        lab[i] = cl;
        ++move_checks;
        if (oracle::objective(rows, lab, cents) < base) c.expect(false, at + ": moving point " + std::to_string(i));
      }
      lab[i] = own;
    }

    // Same start, independent Lloyd.
    const auto init = ml::kmeans_init_pp(pts, k, seed);
    ml::KMeansOptions def;
    const auto mine = ml::kmeans_lloyd(pts, init, def);
    const auto o = oracle::lloyd(rows, to_rows(init), def.tol, def.max_iter);
    c.expect(mine.iterations == o.iterations, at + ": iterations differ");
    c.expect(rel(mine.inertia, o.inertia) <= 1e-9, at + ": oracle inertia");
    const auto got = to_rows(mine.centroids);
    for (std::size_t cl = 0; cl < k; ++cl)
      for (std::size_t j = 0; j < got[cl].size(); ++j)
        c.expect(std::abs(got[cl][j] - o.centroids[cl][j]) <= 1e-9, at + ": centroid");
  }
  report("A4", c, "1000 seeded runs, " + std::to_string(iterations) + " Lloyd iterations, " +
                      std::to_string(move_checks) + " single-point moves tried");
}

void a5_ols() {
  Check c;
  Rng rng(55);
  const std::vector<double> beta{2.5, -1.25, 0.5, 3.0};
  oracle::Rows X(500, std::vector<double>(4));
  std::vector<double> y;
  for (auto& row : X) {
    for (auto& v : row) v = rng.uniform(-10, 10);
    double t = -7.0;
    for (std::size_t j = 0; j < 4; ++j) t += beta[j] * row[j];
    y.push_back(t);
  }
  const auto planted = ml::linreg_fit(ml::Points::from_rows(X), y);
  double worst_planted = std::abs(planted.intercept + 7.0);
  for (std::size_t j = 0; j < 4; ++j) worst_planted = std::max(worst_planted, std::abs(planted.coefficients[j] - beta[j]));
  c.expect(worst_planted <= 1e-9, "planted error " + num(worst_planted));

  double worst_rel = 0;
  std::size_t evals = 0;
  for (int p = 0; p < 50; ++p) {
    oracle::Rows A(200, std::vector<double>(4));
    std::vector<double> b;
    for (auto& row : A) {
      for (auto& v : row) v = rng.uniform(-5, 5);
      b.push_back(rng.normal(row[0] - 2 * row[3], 3.0));
    }
    const auto m = ml::linreg_fit(ml::Points::from_rows(A), b);
    const auto want = oracle::normal_equations(A, b);
    worst_rel = std::max(worst_rel, std::abs(m.intercept - want[0]) / std::max(1e-300, std::abs(want[0])));
    for (std::size_t j = 0; j < 4; ++j)
      worst_rel = std::max(worst_rel, std::abs(m.coefficients[j] - want[j + 1]) / std::max(1e-300, std::abs(want[j + 1])));
    std::vector<double> yhat;
    for (const auto& row : A) yhat.push_back(ml::linreg_predict(m, row));
    const auto e = ml::evaluate(b, yhat);
    c.expect(e.rmse >= e.mae, "problem " + std::to_string(p) + ": RMSE < MAE");
    ++evals;
  }
  c.expect(worst_rel <= 1e-8, "worst relative error " + num(worst_rel));
  for (int i = 0; i < 1000; ++i, ++evals) {
    std::vector<double> t(1 + rng.below(50)), u;
    for (auto& v : t) {
      v = rng.uniform(-100, 100);
      u.push_back(v + rng.normal(0, 1 + rng.below(20)));
    }
    const auto e = ml::evaluate(t, u);
    c.expect(e.rmse >= e.mae, "random evaluation " + std::to_string(i));
  }
  report("A5", c, "planted error " + num(worst_planted, 3) + ", worst relative vs normal equations " +
                      num(worst_rel, 3) + ", RMSE >= MAE on " + std::to_string(evals) + " evaluations");
}

void a6_rerouting() {
  Check c;
  const auto g = routing::load_graph(fixture::read_file(fixture::data_path("diamond.graph")));
  const auto sc = realtime::parse_scenario(fixture::read_file(fixture::data_path("diamond_scenario.json")));
  const auto trips =
      realtime::trips_from_json(nlohmann::json::parse(fixture::read_file(fixture::data_path("diamond_trips.json"))));
  const auto free = routing::dijkstra(g, {}, std::get<routing::NodeId>(trips.at(0).from),
                                      std::get<routing::NodeId>(trips.at(0).to));
  c.expect(free.found && free.cost_sec == 600.0, "free-flow primary " + num(free.cost_sec));
  const auto p = realtime::simulate_paired(g, sc, trips, 0.2, routing::HeuristicSpec::haversine_for(g));
  // Hand-simulated: rerouted 30 + 30 + 660 = 720, kept 30 + 30 + 1350 = 1410.
  c.expect(std::abs(p.total_rerouted - 720.0) <= 1e-9, "rerouted " + num(p.total_rerouted, 17));
  c.expect(std::abs(p.total_baseline - 1410.0) <= 1e-9, "baseline " + num(p.total_baseline, 17));
  c.expect(p.ratio() <= 0.85, "ratio " + num(p.ratio()));
  report("A6", c, "rerouted " + num(p.total_rerouted) + " s vs " + num(p.total_baseline) + " s, ratio " +
                      num(p.ratio(), 4) + " (target <= 0.85)");
}

void a7_trigger() {
  Check c;
  Rng rng(77);
  std::size_t fired = 0;
  for (int i = 0; i < 100000; ++i) {
    double predicted = rng.uniform(0, 5000);
    double live;
    switch (i % 5) {
      case 0: predicted = 0; live = rng.uniform01() < 0.5 ? 0 : rng.uniform(0, 10); break;
      case 1: live = predicted; break;
      default: live = predicted * rng.uniform(0.5, 2.0);
    }
    const double thr = i % 7 == 0 ? 0.2 : rng.uniform(1e-6, 2.0);
    if (i % 11 == 0) live = predicted * (1 + thr);  // on the boundary
    const auto r = realtime::make_report("t", predicted, live, thr);
    fired += r.triggered;
    c.expect(r.triggered == (live > predicted * (1 + thr)),
             "predicted " + num(predicted, 17) + " live " + num(live, 17) + " thr " + num(thr, 17));
  }
  report("A7", c, "100000 triples, " + std::to_string(fired) + " triggered");
}

// ---------------------------------------------------------------------------

void a10_kde() {
  Check c;
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed + 1010);
    spatiotemporal::GridSpec g;
    g.bbox = {40.70, -74.02, 40.70 + rng.uniform(0.02, 0.2), -74.02 + rng.uniform(0.02, 0.2)};
    g.rows = 5 + static_cast<int>(rng.below(40));
    g.cols = 5 + static_cast<int>(rng.below(40));
    const double h = rng.uniform(50, 1500);
    std::vector<spatiotemporal::LatLon> pts;
    std::vector<std::pair<double, double>> raw;
    const std::size_t n = 1 + rng.below(400);
    for (std::size_t i = 0; i < n; ++i) {
      const spatiotemporal::LatLon p{rng.uniform(g.bbox.lat_min - 0.01, g.bbox.lat_max + 0.01),
                              rng.uniform(g.bbox.lon_min - 0.01, g.bbox.lon_max + 0.01)};
      pts.push_back(p);
      raw.emplace_back(p.lat, p.lon);
    }
    const auto hm = spatiotemporal::kde(pts, h, g);
    const auto want = oracle::kde_double_loop(raw, h, g.bbox.lat_min, g.bbox.lon_min, g.bbox.lat_max,
                                              g.bbox.lon_max, g.rows, g.cols);
    const double peak = *std::max_element(want.begin(), want.end());
    c.expect(hm.values.size() == want.size(), "seed " + std::to_string(seed) + ": cell count");
    for (std::size_t i = 0; i < want.size() && i < hm.values.size(); ++i) {
      const double got = hm.values[i].value_or(NAN);
      // Relative to the cell, with a floor far below the kernel peak for the
      // cells where the sum underflows towards zero.
      const double err = std::abs(got - want[i]);
      worst = std::max(worst, err / (std::abs(want[i]) + 1e-3 * peak));
      c.expect(err <= 1e-9 * std::abs(want[i]) + 1e-12 * peak, "seed " + std::to_string(seed) + " cell " +
                                                                    std::to_string(i));
    }
  }

  Rng rng(4);
  spatiotemporal::GridSpec g;
  g.bbox = {40.70, -74.00, 40.80, -73.90};
  g.rows = g.cols = 100;
  std::vector<spatiotemporal::LatLon> pts;
  for (int i = 0; i < 500; ++i) pts.push_back({rng.normal(40.75, 0.008), rng.normal(-73.95, 0.008)});
  const double mass = spatiotemporal::integrate_density(spatiotemporal::kde(pts, 400, g));
  c.expect(std::abs(mass - 1) <= 0.02, "integral " + num(mass));
  report("A10", c, "20 instances vs double-loop oracle (worst scaled error " + num(worst, 3) + "); integral " +
                       num(mass, 6));
}

// ---------------------------------------------------------------------------

struct Run {
  int code;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(URBANFLOW_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, {}};
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

void a11_determinism() {
  Check c;
  const auto trips = fixture::trips(8000);
  for (bool temporal : {false, true}) {
    const auto file = ml::train_duration(trips, 0.8, 42, temporal).file;
    const auto bytes = ml::save_model(file);
    const auto back = ml::load_model(bytes);
    c.expect(back == file, "duration model differs after load");
    c.expect(ml::save_model(back) == bytes, "duration model bytes differ after load");
  }
  {
    Rng rng(11);
    ml::ModelFile f;
    f.model = ml::kmeans_fit(ml::Points::from_rows(blobs(rng, 300, 3, 4)), 4);
    const auto bytes = ml::save_model(f);
    const auto back = ml::load_model(bytes);
    c.expect(back == f && ml::save_model(back) == bytes, "k-means model round trip");
  }

  const fs::path dir = fs::temp_directory_path() / ("urbanflow_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto p = [&](const std::string& n) { return (dir / n).string(); };
  const auto d = [](const std::string& n) { return fixture::data_path(n); };
  // Each command writes into a per-run directory; outputs are then compared file by file.
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands = {
      {"synth-trips --rows 6000 --seed 9 --dirty 0.03 --out @raw.csv", {"raw.csv"}},
      {"ingest @raw.csv --out @clean.csv --report @report.json", {"clean.csv"}},
      {"train duration --data @clean.csv --temporal --seed 5 --out @d.mf --metrics @m.json", {"d.mf", "m.json"}},
      {"train congestion --data @clean.csv --grid 4x4 --min-support 2 --k 4 --seed 3 --out @c.mf --elbow @e.csv",
       {"c.mf", "e.csv"}},
      {"analyze temporal --data @clean.csv --out @bins.csv", {"bins.csv"}},
      {"heatmap --data @clean.csv --day 2 --hour 8 --grid 6x6 --min-support 1 --out @h.geojson", {"h.geojson"}},
      {"heatmap --data @clean.csv --kind density --grid 30x30 --out @k.grid", {"k.grid"}},
      {"gen-graph --kind random --nodes 300 --seed 4 --out @g.graph", {"g.graph"}},
      {"simulate --graph " + d("demo.graph") + " --scenario " + d("demo_scenario.json") + " --trips " +
           d("diamond_trips.json") + " --out @demo_log.json",
       {}},
      {"simulate --graph " + d("diamond.graph") + " --scenario " + d("diamond_scenario.json") + " --trips " +
           d("diamond_trips.json") + " --out @log.json",
       {"log.json"}},
  };
  std::size_t compared = 0;
  for (const char* run : {"r1", "r2"}) fs::create_directories(dir / run);
  for (const auto& [tmpl, outputs] : commands) {
    std::string texts[2];
    for (int r = 0; r < 2; ++r) {
      const std::string sub = r == 0 ? "r1/" : "r2/";
      std::string args;
      for (char ch : tmpl) args += ch == '@' ? p(sub) : std::string(1, ch);
      const auto res = cli(args);
      texts[r] = res.out;
      // The demo graph has no nodes 1..5 of the diamond trips, so that run
      // is only here to show stdout stays identical even on failure.
      if (!outputs.empty()) c.expect(res.code == 0, args + " exited " + std::to_string(res.code));
    }
    for (const auto& o : outputs) {
      const auto a = fixture::read_file(p("r1/" + o)), b = fixture::read_file(p("r2/" + o));
      c.expect(!a.empty() && a == b, o + " differs across runs");
      ++compared;
    }
    // stdout carries the output paths, which differ by run directory.
    std::string s0 = texts[0], s1 = texts[1];
    for (auto* s : {&s0, &s1})
      for (const std::string sub : {"r1/", "r2/"})
        for (std::size_t at; (at = s->find(p(sub))) != std::string::npos;) s->replace(at, p(sub).size(), "@");
    c.expect(s0 == s1, "stdout differs for " + tmpl);
  }
  fs::remove_all(dir);
  report("A11", c, "3 model round trips bit-exact; " + std::to_string(compared) + " outputs of " +
                       std::to_string(commands.size()) + " seeded commands identical across two runs");
}

// ---------------------------------------------------------------------------
// Real data

// First `want` cleanable rows, read in slices so a full monthly file never
// sits in memory.
ingest::IngestResult ingest_prefix(const std::string& path, std::size_t want, const ingest::TimeZone& tz) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  std::getline(in, header);
  ingest::IngestResult total;
  std::string line;
  while (total.cleaned.size() < want && in) {
    std::string slice = header + '\n';
    for (int i = 0; i < 50000 && std::getline(in, line); ++i) slice += line + '\n';
    std::istringstream s(slice);
    auto part = ingest::run_ingest(s, {}, tz, {}, want - total.cleaned.size());
    total.report.rows_in += part.report.rows_in;
    total.report.rows_out += part.report.rows_out;
    for (auto& r : part.cleaned) total.cleaned.push_back(std::move(r));
    if (part.report.rows_in == 0) break;
  }
  return total;
}

int real_data(const std::string& path) {
  const auto t0 = Clock::now();
  Check c8;
  const auto tz = ingest::TimeZone::load("America/New_York");
  std::vector<ingest::EngineeredTrip> trips;
  ml::DurationTraining model;
  std::size_t rows_in = 0;
  try {
    const auto res = ingest_prefix(path, 100000, tz);
    rows_in = res.report.rows_in;
    trips = ingest::engineer_features(std::span<const ingest::TripRecord>(res.cleaned), tz);
    c8.expect(trips.size() == 100000, "only " + std::to_string(trips.size()) + " cleanable rows");
    model = ml::train_duration(trips, 0.8, 42);
  } catch (const std::exception& e) {
    c8.expect(false, e.what());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c8.expect(secs < 300, "pipeline took " + num(secs) + " s");
  c8.expect(std::isfinite(model.test.rmse) && model.test.rmse < model.baseline_rmse,
            "RMSE " + num(model.test.rmse) + " vs baseline " + num(model.baseline_rmse));
  report("A8", c8, std::to_string(trips.size()) + " trips from " + std::to_string(rows_in) + " rows in " +
                       num(secs, 3) + " s; test RMSE " + num(model.test.rmse, 4) + " min, MAE " +
                       num(model.test.mae, 4) + ", baseline " + num(model.baseline_rmse, 4) +
                       " (reference: about 12.5 min, not asserted)");

  Check c9;
  const auto agg = spatiotemporal::aggregate_temporal(trips);
  bool am = false, pm = false;
  for (const auto& b : spatiotemporal::peak_periods(agg, 0.15)) {
    if (b.day_of_week >= 5) continue;
    am |= b.hour >= 7 && b.hour <= 9;
    pm |= b.hour >= 17 && b.hour <= 19;
  }
  c9.expect(am, "no weekday 7-9 peak bin");
  c9.expect(pm, "no weekday 17-19 peak bin");
  double peak_sum = 0, off_sum = 0;
  std::size_t peak_n = 0, off_n = 0;
  for (const auto& t : trips) {
    if (t.day_of_week >= 5 || !(t.trip.trip_distance > 0)) continue;
    const double mpm = t.duration_min() / t.trip.trip_distance;
    const int h = t.hour_of_day;
    if ((h >= 7 && h <= 9) || (h >= 17 && h <= 19)) peak_sum += mpm, ++peak_n;
    else if (h >= 12 && h <= 14) off_sum += mpm, ++off_n;
  }
  const double peak_mean = peak_n ? peak_sum / static_cast<double>(peak_n) : NAN;
  const double off_mean = off_n ? off_sum / static_cast<double>(off_n) : NAN;
  c9.expect(peak_mean > off_mean, "peak " + num(peak_mean) + " vs midday " + num(off_mean));
  report("A9", c9, "weekday AM peak " + std::string(am ? "yes" : "no") + ", PM peak " + (pm ? "yes" : "no") +
                       "; peak " + num(peak_mean, 4) + " vs midday " + num(off_mean, 4) + " min/mi (+" +
                       num(100 * (peak_mean / off_mean - 1), 3) + "%)");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::optional<std::string> sample;
  bool only_real = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--real-data" && i + 1 < argc) {
      sample = argv[++i];
    } else if (a == "--real-data-only") {
      only_real = true;
    } else {
      std::cerr << "usage: acceptance [--real-data <csv>] [--real-data-only]\n";
      return 2;
    }
  }
  if (!sample)
    if (const char* env = std::getenv("URBANFLOW_NYC_SAMPLE"); env && *env) sample = env;
  if (sample && !fs::is_regular_file(*sample)) {
    std::cerr << "real-data sample not found: " << *sample << '\n';
    return 2;
  }

  if (!only_real) {
    a1_haversine();
    a2_a3_search();
    a4_kmeans();
    a5_ols();
    a6_rerouting();
    a7_trigger();
  }
  if (sample) {
    real_data(*sample);
  } else {
    std::cout << "A8 SKIP  no real NYC sample (pass --real-data <csv> or set URBANFLOW_NYC_SAMPLE)\n"
              << "A9 SKIP  no real NYC sample\n";
    if (only_real) return 77;
  }
  if (!only_real) {
    a10_kde();
    a11_determinism();
  }
  std::cout << (g_failed ? "FAILED " + std::to_string(g_failed) + " criteria" : std::string("all run criteria passed"))
            << std::endl;
  return g_failed ? 1 : 0;
}
