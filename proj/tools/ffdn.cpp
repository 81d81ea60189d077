// Command line front end: trace generation, single runs, experiment
// sweeps and the Monte Carlo robustness validator.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ffdn/engine.hpp"
#include "ffdn/experiments.hpp"
#include "ffdn/model.hpp"
#include "ffdn/scenario.hpp"

namespace {

ffdn::Scenario resolve_scenario(const std::string& path) {
  if (path.empty()) {
    return ffdn::default_scenario();
  }
  return ffdn::load_scenario(path);
}

void print_summary(const ffdn::RunSummary& s) {
  std::printf(
      "method=%s total_segments=%ld missed=%ld miss_rate=%.6f "
      "local_cache=%ld on_demand=%ld remote_fdn=%ld remote_cloud=%ld "
      "seed=%llu\n",
      ffdn::method_name(s.method).c_str(), s.total_segments,
      s.missed_segments, s.miss_rate, s.local_cache, s.on_demand,
      s.remote_fdn, s.remote_cloud,
      static_cast<unsigned long long>(s.seed));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated fog delivery network simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  app.add_option("--scenario", scenario_path,
                 "Scenario JSON (omit for the built-in default)");

  // gen-trace
  auto* gen = app.add_subcommand("gen-trace", "Generate a workload trace");
  std::string gen_out = "trace.txt";
  std::uint64_t gen_seed = 1;
  long gen_requests = 0;
  long gen_segments = 0;
  gen->add_option("--out", gen_out, "Output trace file");
  gen->add_option("--seed", gen_seed, "Trace seed");
  gen->add_option("--requests", gen_requests, "Number of requests");
  gen->add_option("--segments", gen_segments,
                  "Target total segment count (overrides --requests)");

  // init-scenario
  auto* init = app.add_subcommand("init-scenario",
                                  "Write the default scenario to a file");
  std::string init_out = "scenario.json";
  init->add_option("--out", init_out, "Output scenario file");

  // run
  auto* runc = app.add_subcommand("run", "Run one trace under one method");
  std::string run_method = "robust_ffdn";
  std::string run_trace_path;
  std::uint64_t run_seed = 1;
  std::uint64_t run_trace_seed = 1;
  std::string run_event_log;
  std::string run_outcomes;
  bool run_queue_aware = false;
  bool run_jit = false;
  runc->add_option("--method", run_method, "Delivery method");
  runc->add_option("--trace", run_trace_path,
                   "Trace file (omit to generate from scenario defaults)");
  runc->add_option("--seed", run_seed, "Engine seed");
  runc->add_option("--trace-seed", run_trace_seed,
                   "Seed for the generated trace when --trace is omitted");
  runc->add_option("--event-log", run_event_log, "Per-segment event log file");
  runc->add_option("--outcomes", run_outcomes, "Per-segment outcome CSV");
  runc->add_flag("--queue-aware", run_queue_aware,
                 "Shift on-demand estimates by the current worker backlog");
  runc->add_flag("--just-in-time", run_jit,
                 "Decide each segment one GOP before its deadline");

  // sweep
  auto* sweepc = app.add_subcommand("sweep", "Run an experiment sweep");
  std::string sweep_spec_path;
  std::string sweep_out = "results.csv";
  int sweep_trace_count = 0;
  std::string sweep_kind;
  std::vector<double> sweep_values;
  std::vector<std::string> sweep_methods;
  std::uint64_t sweep_seed = 42;
  sweepc->add_option("--spec", sweep_spec_path, "Sweep spec JSON file");
  sweepc->add_option("--out", sweep_out, "Results CSV path");
  sweepc->add_option("--trace-count", sweep_trace_count,
                     "Override the spec's trace count");
  sweepc->add_option("--kind", sweep_kind,
                     "cache_level | workload_size | edge_latency");
  sweepc->add_option("--values", sweep_values, "Sweep points");
  sweepc->add_option("--methods", sweep_methods, "Methods to compare");
  sweepc->add_option("--seed", sweep_seed, "Base seed");

  // validate
  auto* val = app.add_subcommand(
      "validate", "Monte Carlo check of the analytic robustness math");
  int val_cells = 100;
  long val_samples = 100000;
  std::uint64_t val_seed = 1;
  val->add_option("--cells", val_cells, "Randomized grid cells");
  val->add_option("--samples", val_samples, "Monte Carlo samples per cell");
  val->add_option("--seed", val_seed, "Grid seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const ffdn::Scenario sc = resolve_scenario(scenario_path);
      const auto catalog = ffdn::generate_catalog(sc.catalog);
      ffdn::TraceParams tp = sc.trace_defaults;
      tp.viewers = sc.viewers;
      if (gen_segments > 0) {
        tp.target_segments = gen_segments;
        tp.request_count = 0;
      } else if (gen_requests > 0) {
        tp.target_segments = 0;
        tp.request_count = gen_requests;
      }
      const auto trace = ffdn::generate_trace(tp, catalog, gen_seed);
      ffdn::write_trace(trace, gen_out);
      std::printf("wrote %zu requests (%ld segments) to %s\n",
                  trace.requests.size(), trace.total_segments,
                  gen_out.c_str());
    } else if (init->parsed()) {
      ffdn::save_scenario(ffdn::default_scenario(), init_out);
      std::printf("wrote default scenario to %s\n", init_out.c_str());
    } else if (runc->parsed()) {
      const ffdn::Scenario sc = resolve_scenario(scenario_path);
      const auto catalog = ffdn::generate_catalog(sc.catalog);
      ffdn::WorkloadTrace trace;
      if (run_trace_path.empty()) {
        ffdn::TraceParams tp = sc.trace_defaults;
        tp.viewers = sc.viewers;
        trace = ffdn::generate_trace(tp, catalog, run_trace_seed);
      } else {
        trace = ffdn::read_trace(run_trace_path, catalog);
      }
      const ffdn::MethodKind method = ffdn::method_from_name(run_method);
      ffdn::CachePlan plan;
      if (method == ffdn::MethodKind::CDN) {
        plan = ffdn::build_cache_plan(
            sc.nodes, catalog, sc.cache.cdn_video_fraction,
            ffdn::CacheGranularity::per_video, sc.cache.bias, sc.cache.seed);
      } else if (method != ffdn::MethodKind::CentralCloud) {
        plan = ffdn::build_cache_plan(sc.nodes, catalog, sc.cache.fraction,
                                      sc.cache.granularity, sc.cache.bias,
                                      sc.cache.seed);
      }
      ffdn::RunOptions opts;
      opts.queue_aware = run_queue_aware || sc.flags.queue_aware;
      opts.just_in_time = run_jit || sc.flags.just_in_time;
      opts.event_log_path = run_event_log;
      const auto result =
          ffdn::run(sc, catalog, plan, trace, method, run_seed, opts);
      print_summary(result.summary);
      if (!run_outcomes.empty()) {
        std::ofstream out(run_outcomes);
        out << "request_id,video_id,segment,choice,source,delivered_at,"
               "deadline,missed\n";
        for (const auto& o : result.outcomes) {
          const char* kind =
              o.choice.kind == ffdn::DeliveryChoice::Kind::LocalCache
                  ? "local_cache"
                  : (o.choice.kind == ffdn::DeliveryChoice::Kind::OnDemand
                         ? "on_demand"
                         : "remote_fetch");
          char buf[128];
          std::snprintf(buf, sizeof(buf), "%.9f,%.9f", o.delivered_at,
                        o.deadline);
          out << o.request_id << ',' << o.video_id << ',' << o.segment_index
              << ',' << kind << ',' << o.choice.source << ',' << buf << ','
              << (o.missed ? 1 : 0) << '\n';
        }
      }
    } else if (sweepc->parsed()) {
      ffdn::SweepSpec spec;
      if (!sweep_spec_path.empty()) {
        spec = ffdn::load_sweep_spec(sweep_spec_path);
      } else {
        if (sweep_kind.empty() || sweep_values.empty() ||
            sweep_methods.empty()) {
          std::fprintf(stderr,
                       "sweep: provide --spec or all of --kind/--values/"
                       "--methods\n");
          return 2;
        }
        spec.kind = ffdn::sweep_kind_from_name(sweep_kind);
        spec.values = sweep_values;
        for (const auto& m : sweep_methods) {
          spec.methods.push_back(ffdn::method_from_name(m));
        }
        spec.scenario = resolve_scenario(scenario_path);
        spec.base_seed = sweep_seed;
      }
      if (sweep_trace_count > 0) {
        spec.trace_count = sweep_trace_count;
      }
      const auto results = ffdn::run_sweep(spec);
      std::ofstream out(sweep_out);
      if (!out) {
        throw std::runtime_error("cannot open " + sweep_out);
      }
      out << ffdn::results_to_csv(results);
      std::printf("wrote %zu aggregate rows to %s\n", results.size(),
                  sweep_out.c_str());
    } else if (val->parsed()) {
      const auto report =
          ffdn::validate_robustness(val_cells, val_samples, val_seed);
      std::printf(
          "cells=%d samples=%ld max_dev_local=%.6f max_dev_on_demand=%.6f "
          "max_dev_remote=%.6f max_dev=%.6f\n",
          val_cells, val_samples, report.max_dev_local,
          report.max_dev_on_demand, report.max_dev_remote, report.max_dev());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
