#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "urbanflow/cli/commands.hpp"

using namespace urbanflow;

int main(int argc, char** argv) {
  CLI::App app{"urbanflow: taxi-trip analytics, traffic-aware routing and rerouting simulation"};
  app.require_subcommand(1);
  int code = cli::kExitOk;
  std::function<int()> run;

  // ingest
  cli::IngestOptions ingest;
  std::size_t limit = 0;
  auto* c_ingest = app.add_subcommand("ingest", "parse, clean and feature-check a TLC trip CSV");
  c_ingest->add_option("input", ingest.input, "raw trips CSV")->required();
  c_ingest->add_option("--out", ingest.out, "cleaned CSV")->required();
  c_ingest->add_option("--report", ingest.report, "cleaning report (JSON)")->required();
  c_ingest->add_option("--timezone", ingest.timezone, "zone of the CSV timestamps")->capture_default_str();
  c_ingest->add_option("--limit", limit, "stop after this many cleaned rows");
  c_ingest->add_option("--max-speed", ingest.clean.max_speed_mph, "mph")->capture_default_str();
  c_ingest->add_option("--min-duration", ingest.clean.min_duration_sec, "seconds")->capture_default_str();
  c_ingest->add_option("--max-duration", ingest.clean.max_duration_sec, "seconds")->capture_default_str();
  c_ingest->add_option("--max-distance", ingest.clean.max_distance_mi, "miles")->capture_default_str();
  c_ingest->callback([&] {
    if (limit) ingest.limit = limit;
    run = [&] { return cli::cmd_ingest(ingest, std::cout); };
  });

  // train duration | congestion
  auto* c_train = app.add_subcommand("train", "fit a model");
  c_train->require_subcommand(1);
  cli::TrainDurationOptions td;
  auto* c_td = c_train->add_subcommand("duration", "OLS trip-duration model");
  c_td->add_option("--data", td.data, "cleaned CSV")->required();
  c_td->add_option("--split", td.split, "training fraction")->capture_default_str();
  c_td->add_option("--seed", td.seed)->capture_default_str();
  c_td->add_option("--out", td.out, "model file")->required();
  c_td->add_option("--metrics", td.metrics, "metrics JSON")->required();
  c_td->add_flag("--temporal", td.temporal, "add day and hour one-hot features");
  c_td->add_option("--timezone", td.timezone)->capture_default_str();
  c_td->callback([&] { run = [&] { return cli::cmd_train_duration(td, std::cout); }; });

  cli::TrainCongestionOptions tc;
  std::string elbow;
  auto* c_tc = c_train->add_subcommand("congestion", "K-Means congestion regimes over cell-bins");
  c_tc->add_option("--data", tc.data, "cleaned CSV")->required();
  c_tc->add_option("--k", tc.k)->capture_default_str();
  c_tc->add_option("--seed", tc.seed)->capture_default_str();
  c_tc->add_option("--out", tc.out, "model file")->required();
  c_tc->add_option("--elbow", elbow, "inertia-vs-k CSV for k = 1..10");
  c_tc->add_option("--grid", tc.grid)->capture_default_str();
  c_tc->add_option("--min-support", tc.min_support)->capture_default_str();
  c_tc->add_option("--timezone", tc.timezone)->capture_default_str();
  c_tc->callback([&] {
    if (!elbow.empty()) tc.elbow = elbow;
    run = [&] { return cli::cmd_train_congestion(tc, std::cout); };
  });

  // heatmap
  cli::HeatmapOptions hm;
  int day = -1, hour = -1;
  std::string format;
  auto* c_hm = app.add_subcommand("heatmap", "congestion or density heatmap export");
  c_hm->add_option("--data", hm.data, "cleaned CSV")->required();
  c_hm->add_option("--day", day, "0 = Monday .. 6 = Sunday");
  c_hm->add_option("--hour", hour, "0..23");
  c_hm->add_option("--grid", hm.grid)->capture_default_str();
  c_hm->add_option("--out", hm.out)->required();
  c_hm->add_option("--format", format, "grid or geojson (default from the extension)");
  c_hm->add_option("--kind", hm.kind, "congestion or density")->capture_default_str();
  c_hm->add_option("--bandwidth", hm.bandwidth_m, "KDE bandwidth in metres")->capture_default_str();
  c_hm->add_option("--min-support", hm.min_support)->capture_default_str();
  c_hm->add_option("--timezone", hm.timezone)->capture_default_str();
  c_hm->callback([&] {
    if (c_hm->count("--day")) hm.day = day;
    if (c_hm->count("--hour")) hm.hour = hour;
    if (!format.empty()) hm.format = format;
    run = [&] { return cli::cmd_heatmap(hm, std::cout); };
  });

  // analyze temporal
  auto* c_an = app.add_subcommand("analyze", "aggregate analyses");
  c_an->require_subcommand(1);
  cli::AnalyzeTemporalOptions at;
  auto* c_at = c_an->add_subcommand("temporal", "168-bin congestion index table with peak flags");
  c_at->add_option("--data", at.data, "cleaned CSV")->required();
  c_at->add_option("--out", at.out, "bins CSV")->required();
  c_at->add_option("--top", at.top_q, "peak fraction")->capture_default_str();
  c_at->add_flag("--fill", at.fill, "interpolate empty bins");
  c_at->add_option("--timezone", at.timezone)->capture_default_str();
  c_at->callback([&] { run = [&] { return cli::cmd_analyze_temporal(at, std::cout); }; });

  // route
  cli::RouteOptions ro;
  std::string scenario;
  auto* c_ro = app.add_subcommand("route", "fastest route between two coordinates");
  c_ro->add_option("--graph", ro.graph)->required();
  c_ro->add_option("--from", ro.from, "lat,lon")->required();
  c_ro->add_option("--to", ro.to, "lat,lon")->required();
  c_ro->add_option("--scenario", scenario, "apply scenario events up to --at");
  c_ro->add_option("--at", ro.at, "scenario time in seconds")->capture_default_str();
  c_ro->add_flag("--json", ro.json, "print the route as JSON");
  c_ro->callback([&] {
    if (!scenario.empty()) ro.scenario = scenario;
    run = [&] { return cli::cmd_route(ro, std::cout); };
  });

  // simulate
  cli::SimulateOptions so;
  auto* c_si = app.add_subcommand("simulate", "paired rerouting simulation (with and without rerouting)");
  c_si->add_option("--graph", so.graph)->required();
  c_si->add_option("--scenario", so.scenario)->required();
  c_si->add_option("--trips", so.trips)->required();
  c_si->add_option("--out", so.out, "event log JSON")->required();
  c_si->add_option("--threshold", so.threshold, "deviation threshold")->capture_default_str();
  c_si->add_option("--max-ticks", so.max_ticks)->capture_default_str();
  c_si->callback([&] { run = [&] { return cli::cmd_simulate(so, std::cout); }; });

  // serve
  cli::ServeOptions sv;
  int port = -1;
  auto* c_sv = app.add_subcommand("serve", "HTTP API");
  c_sv->add_option("--config", sv.config)->required();
  c_sv->add_option("--port", port, "override the configured port");
  c_sv->callback([&] {
    if (port >= 0) sv.port = port;
    run = [&] { return cli::cmd_serve(sv, std::cout); };
  });

  // gen-graph
  cli::GenGraphOptions gg;
  auto* c_gg = app.add_subcommand("gen-graph", "write a synthetic road graph");
  c_gg->add_option("--kind", gg.kind, "grid or random")->capture_default_str();
  c_gg->add_option("--rows", gg.rows)->capture_default_str();
  c_gg->add_option("--cols", gg.cols)->capture_default_str();
  c_gg->add_option("--spacing", gg.spacing_m, "metres between grid nodes")->capture_default_str();
  c_gg->add_option("--speed", gg.speed_mps, "m/s")->capture_default_str();
  c_gg->add_option("--nodes", gg.nodes, "random graph size")->capture_default_str();
  c_gg->add_option("--seed", gg.seed)->capture_default_str();
  c_gg->add_option("--out", gg.out)->required();
  c_gg->callback([&] { run = [&] { return cli::cmd_gen_graph(gg, std::cout); }; });

  // synth-trips
  cli::SynthTripsOptions st;
  auto* c_st = app.add_subcommand("synth-trips", "write a seeded synthetic TLC-schema trip CSV");
  c_st->add_option("--rows", st.synth.rows)->capture_default_str();
  c_st->add_option("--seed", st.synth.seed)->capture_default_str();
  c_st->add_option("--dirty", st.synth.dirty_fraction, "fraction of corrupted rows")->capture_default_str();
  c_st->add_option("--out", st.out)->required();
  c_st->callback([&] { run = [&] { return cli::cmd_synth_trips(st, std::cout); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  try {
    code = run ? run() : cli::kExitUsage;
  } catch (const cli::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitRuntime;
  }
  return code;
}
