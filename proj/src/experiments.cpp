#include "ffdn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ffdn {

using nlohmann::json;

std::string sweep_kind_name(SweepKind kind) {
  switch (kind) {
    case SweepKind::cache_level:
      return "cache_level";
    case SweepKind::workload_size:
      return "workload_size";
    case SweepKind::edge_latency:
      return "edge_latency";
  }
  throw std::logic_error("unknown sweep kind");
}

SweepKind sweep_kind_from_name(const std::string& name) {
  if (name == "cache_level") return SweepKind::cache_level;
  if (name == "workload_size") return SweepKind::workload_size;
  if (name == "edge_latency") return SweepKind::edge_latency;
  throw ConfigError("unknown sweep kind: " + name);
}

std::pair<double, std::optional<double>> summarize(
    const std::vector<double>& values) {
  if (values.empty()) {
    throw std::invalid_argument("summarize: empty value list");
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) {
    return {mean, std::nullopt};
  }
  double ss = 0.0;
  for (double v : values) {
    ss += (v - mean) * (v - mean);
  }
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  const double half =
      1.96 * sd / std::sqrt(static_cast<double>(values.size()));
  return {mean, half};
}

namespace {

void validate_spec(const SweepSpec& spec) {
  if (spec.values.empty()) {
    throw ConfigError("sweep spec: values must be non-empty");
  }
  for (std::size_t i = 1; i < spec.values.size(); ++i) {
    if (spec.values[i] <= spec.values[i - 1]) {
      throw ConfigError("sweep spec: values must be strictly increasing");
    }
  }
  if (spec.methods.empty()) {
    throw ConfigError("sweep spec: methods must be non-empty");
  }
  if (spec.trace_count < 1) {
    throw ConfigError("sweep spec: trace_count must be >= 1");
  }
  if (spec.kind == SweepKind::cache_level) {
    for (double v : spec.values) {
      if (v < 0.0 || v > 1.0) {
        throw ConfigError("sweep spec: cache levels must be in [0,1]");
      }
    }
  }
}

CachePlan plan_for(const Scenario& sc, const std::vector<VideoAsset>& catalog,
                   MethodKind method, SweepKind kind, double point) {
  // one cache draw for the whole sweep: points vary only through their
  // own parameter, keeping comparisons across points paired
  const std::uint64_t plan_seed = derive_seed(sc.cache.seed, 0);
  switch (method) {
    case MethodKind::CentralCloud:
      return CachePlan{};  // no edge caching
    case MethodKind::CDN:
      // whole videos at the fixed realistic CDN level
      return build_cache_plan(sc.nodes, catalog, sc.cache.cdn_video_fraction,
                              CacheGranularity::per_video, sc.cache.bias,
                              plan_seed);
    default: {
      const double fraction =
          kind == SweepKind::cache_level ? point : sc.cache.fraction;
      return build_cache_plan(sc.nodes, catalog, fraction,
                              CacheGranularity::per_segment, sc.cache.bias,
                              plan_seed);
    }
  }
}

}  // namespace

std::vector<AggregateResult> run_sweep(const SweepSpec& spec) {
  validate_spec(spec);
  const std::vector<VideoAsset> catalog = generate_catalog(spec.scenario.catalog);
  const double edge_baseline = spec.kind == SweepKind::edge_latency
                                   ? spec.scenario.edge_latency_baseline()
                                   : 1.0;

  std::vector<AggregateResult> results;
  for (std::size_t pi = 0; pi < spec.values.size(); ++pi) {
    const double point = spec.values[pi];

    Scenario sc = spec.scenario;
    if (spec.kind == SweepKind::edge_latency) {
      sc.scale_edge_latency(point / edge_baseline);
    }
    TraceParams tp = sc.trace_defaults;
    tp.viewers = sc.viewers;
    if (spec.kind == SweepKind::workload_size) {
      tp.target_segments = static_cast<long>(std::llround(point));
      tp.request_count = 0;
    }

    // same traces for every method at this point; traces are also shared
    // across points unless the point itself changes the trace
    const std::uint64_t trace_pi =
        spec.kind == SweepKind::workload_size ? pi : 0;
    std::vector<WorkloadTrace> traces;
    traces.reserve(static_cast<std::size_t>(spec.trace_count));
    for (int ti = 0; ti < spec.trace_count; ++ti) {
      traces.push_back(generate_trace(
          tp, catalog,
          derive_seed(spec.base_seed, trace_pi,
                      static_cast<std::uint64_t>(ti))));
    }

    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
      const MethodKind method = spec.methods[mi];
      const CachePlan plan = plan_for(sc, catalog, method, spec.kind, point);

      AggregateResult agg;
      agg.kind = spec.kind;
      agg.point = point;
      agg.method = method;
      agg.trace_count = spec.trace_count;
      std::vector<double> miss_rates;
      miss_rates.reserve(traces.size());

      RunOptions opts;
      opts.queue_aware = sc.flags.queue_aware;
      opts.just_in_time = sc.flags.just_in_time;

      for (int ti = 0; ti < spec.trace_count; ++ti) {
        const std::uint64_t run_seed =
            derive_seed(spec.base_seed, 1000 + pi * 64 + mi,
                        static_cast<std::uint64_t>(ti));
        RunResult rr;
        try {
          rr = run(sc, catalog, plan, traces[static_cast<std::size_t>(ti)],
                   method, run_seed, opts);
        } catch (const std::exception& e) {
          throw std::runtime_error(
              "sweep run failed (point=" + std::to_string(point) +
              ", method=" + method_name(method) +
              ", trace=" + std::to_string(ti) + "): " + e.what());
        }
        miss_rates.push_back(rr.summary.miss_rate);
        agg.total_segments += rr.summary.total_segments;
        agg.local_cache += rr.summary.local_cache;
        agg.on_demand += rr.summary.on_demand;
        agg.remote_fdn += rr.summary.remote_fdn;
        agg.remote_cloud += rr.summary.remote_cloud;
      }
      const auto [mean, half] = summarize(miss_rates);
      agg.mean_miss_rate = mean;
      agg.ci_half_width = half;
      results.push_back(std::move(agg));
    }
  }
  return results;
}

std::string results_to_csv(const std::vector<AggregateResult>& results) {
  std::ostringstream out;
  out << "sweep_kind,sweep_point,method,trace_count,mean_miss_rate,"
         "ci_half_width,total_segments,local_cache,on_demand,remote_fdn,"
         "remote_cloud\n";
  char buf[64];
  for (const auto& r : results) {
    out << sweep_kind_name(r.kind) << ',';
    std::snprintf(buf, sizeof(buf), "%.6g", r.point);
    out << buf << ',' << method_name(r.method) << ',' << r.trace_count << ',';
    std::snprintf(buf, sizeof(buf), "%.9f", r.mean_miss_rate);
    out << buf << ',';
    if (r.ci_half_width) {
      std::snprintf(buf, sizeof(buf), "%.9f", *r.ci_half_width);
      out << buf;
    }
    out << ',' << r.total_segments << ',' << r.local_cache << ','
        << r.on_demand << ',' << r.remote_fdn << ',' << r.remote_cloud
        << '\n';
  }
  return out.str();
}

double ValidationReport::max_dev() const {
  return std::max({max_dev_local, max_dev_on_demand, max_dev_remote});
}

ValidationReport validate_robustness(int cells, long mc_samples,
                                     std::uint64_t seed) {
  if (mc_samples < 10000) {
    throw std::invalid_argument("validate_robustness: mc_samples >= 1e4");
  }
  SeededRng rng(seed);
  ValidationReport report;

  for (int cell = 0; cell < cells; ++cell) {
    const double proc_mean = rng.uniform(0.2, 3.0);
    const GaussianModel proc(proc_mean, rng.uniform(0.05, 0.4) * proc_mean);
    const double hop1_mean = rng.uniform(0.05, 2.0);
    const GaussianModel hop1(hop1_mean, rng.uniform(0.05, 0.5) * hop1_mean);
    const double hop2_mean = rng.uniform(0.05, 2.0);
    const GaussianModel hop2(hop2_mean, rng.uniform(0.05, 0.5) * hop2_mean);

    struct Pipeline {
      GaussianModel combined;
      const GaussianModel* parts[2];
      int part_count;
      double* max_dev;
    };
    Pipeline pipelines[3] = {
        {hop2, {&hop2, nullptr}, 1, &report.max_dev_local},
        {convolve(proc, hop2), {&proc, &hop2}, 2, &report.max_dev_on_demand},
        {convolve(hop1, hop2), {&hop1, &hop2}, 2, &report.max_dev_remote},
    };

    for (auto& p : pipelines) {
      const double slack = rng.uniform(0.3, 1.7) * p.combined.mean;
      const double analytic = cdf_at(p.combined, slack);
      long on_time = 0;
      for (long s = 0; s < mc_samples; ++s) {
        double total = 0.0;
        for (int k = 0; k < p.part_count; ++k) {
          total += rng.normal(*p.parts[k]);
        }
        if (total <= slack) {
          ++on_time;
        }
      }
      const double empirical =
          static_cast<double>(on_time) / static_cast<double>(mc_samples);
      *p.max_dev = std::max(*p.max_dev, std::abs(analytic - empirical));
    }
  }
  return report;
}

SweepSpec load_sweep_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_sweep_spec: cannot open " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  const json j = json::parse(ss.str());

  SweepSpec spec;
  spec.kind = sweep_kind_from_name(j.at("kind").get<std::string>());
  spec.values = j.at("values").get<std::vector<double>>();
  for (const auto& m : j.at("methods")) {
    spec.methods.push_back(method_from_name(m.get<std::string>()));
  }
  if (j.contains("scenario_path") && !j.at("scenario_path").is_null()) {
    spec.scenario = load_scenario(j.at("scenario_path").get<std::string>());
  } else {
    spec.scenario = default_scenario();
  }
  if (j.contains("trace_count")) {
    spec.trace_count = j.at("trace_count").get<int>();
  }
  if (j.contains("base_seed")) {
    spec.base_seed = j.at("base_seed").get<std::uint64_t>();
  }
  return spec;
}

}  // namespace ffdn
