#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ffdn/engine.hpp"
#include "ffdn/policies.hpp"
#include "ffdn/scenario.hpp"

namespace ffdn {

enum class SweepKind { cache_level, workload_size, edge_latency };

std::string sweep_kind_name(SweepKind kind);
SweepKind sweep_kind_from_name(const std::string& name);

struct SweepSpec {
  SweepKind kind = SweepKind::cache_level;
  std::vector<double> values;  // non-empty, strictly increasing
  std::vector<MethodKind> methods;
  Scenario scenario;
  int trace_count = 30;
  std::uint64_t base_seed = 42;
};

struct AggregateResult {
  SweepKind kind;
  double point = 0.0;
  MethodKind method;
  int trace_count = 0;
  double mean_miss_rate = 0.0;
  std::optional<double> ci_half_width;  // absent when trace_count == 1
  long total_segments = 0;              // summed over traces
  long local_cache = 0;
  long on_demand = 0;
  long remote_fdn = 0;
  long remote_cloud = 0;
};

// Arithmetic mean and normal-approximation 95% CI half-width
// (1.96 * s / sqrt(n)); half-width is absent for a single value.
std::pair<double, std::optional<double>> summarize(
    const std::vector<double>& values);

// Runs every (point, method, trace) combination of the spec. Traces are
// shared across methods at a point; every child seed derives from the
// base seed via derive_seed, so each run is reproducible in isolation.
std::vector<AggregateResult> run_sweep(const SweepSpec& spec);

// Stable-order CSV with one row per (point, method).
std::string results_to_csv(const std::vector<AggregateResult>& results);

struct ValidationReport {
  double max_dev_local = 0.0;      // single-transfer pipeline
  double max_dev_on_demand = 0.0;  // processing (*) transfer
  double max_dev_remote = 0.0;     // transfer (*) transfer
  double max_dev() const;
};

// Compares the analytic robustness of each choice pipeline against the
// empirical on-time fraction of mc_samples Monte Carlo realizations, on
// a randomized grid of `cells` parameter cells.
ValidationReport validate_robustness(int cells, long mc_samples,
                                     std::uint64_t seed);

SweepSpec load_sweep_spec(const std::string& path);

}  // namespace ffdn
