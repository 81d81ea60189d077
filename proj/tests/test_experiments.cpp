#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "ffdn/experiments.hpp"

using namespace ffdn;

namespace {

// Small enough to keep sweep tests fast while still exercising every
// method and both aggregation axes.
SweepSpec small_spec() {
  SweepSpec spec;
  spec.kind = SweepKind::cache_level;
  spec.values = {0.0, 0.3, 0.6, 0.9};
  spec.methods = {MethodKind::CentralCloud, MethodKind::CDN,
                  MethodKind::IsolatedFDN, MethodKind::RobustFFDN};
  spec.scenario = default_scenario();
  spec.scenario.trace_defaults.target_segments = 200;
  spec.trace_count = 2;
  spec.base_seed = 77;
  return spec;
}

}  // namespace

TEST_CASE("summarize") {
  const auto constant = summarize(std::vector<double>(30, 0.05));
  CHECK(constant.first == doctest::Approx(0.05));
  REQUIRE(constant.second.has_value());
  CHECK(*constant.second == doctest::Approx(0.0));

  // {0, 1}: sd = 1/sqrt(2) -> half width 1.96 * 0.7071 / 1.4142
  const auto pair = summarize({0.0, 1.0});
  CHECK(pair.first == doctest::Approx(0.5));
  REQUIRE(pair.second.has_value());
  CHECK(*pair.second == doctest::Approx(0.98).epsilon(1e-6));

  const auto single = summarize({0.42});
  CHECK(single.first == doctest::Approx(0.42));
  CHECK_FALSE(single.second.has_value());

  CHECK_THROWS_AS(summarize({}), std::invalid_argument);
}

TEST_CASE("sweep spec validation") {
  SweepSpec spec = small_spec();

  spec.values = {};
  CHECK_THROWS_AS(run_sweep(spec), ConfigError);
  spec.values = {0.3, 0.3};
  CHECK_THROWS_AS(run_sweep(spec), ConfigError);
  spec.values = {0.6, 0.3};
  CHECK_THROWS_AS(run_sweep(spec), ConfigError);
  spec.values = {0.3, 1.5};
  CHECK_THROWS_AS(run_sweep(spec), ConfigError);

  spec = small_spec();
  spec.methods = {};
  CHECK_THROWS_AS(run_sweep(spec), ConfigError);

  spec = small_spec();
  spec.trace_count = 0;
  CHECK_THROWS_AS(run_sweep(spec), ConfigError);
}

TEST_CASE("cache sweep structure") {
  const SweepSpec spec = small_spec();
  const auto results = run_sweep(spec);
  REQUIRE(results.size() == spec.values.size() * spec.methods.size());

  std::size_t i = 0;
  for (double point : spec.values) {
    for (MethodKind m : spec.methods) {
      const auto& r = results[i++];
      CHECK(r.kind == SweepKind::cache_level);
      CHECK(r.point == point);
      CHECK(r.method == m);
      CHECK(r.trace_count == 2);
      CHECK(r.total_segments == 400);  // 200 targeted segments x 2 traces
      CHECK(r.local_cache + r.on_demand + r.remote_fdn + r.remote_cloud ==
            r.total_segments);
      CHECK(r.mean_miss_rate >= 0.0);
      CHECK(r.mean_miss_rate <= 1.0);
      CHECK(r.ci_half_width.has_value());
      if (m == MethodKind::CentralCloud) {
        CHECK(r.local_cache == 0);  // sweeping cache level cannot help it
      }
    }
  }
}

TEST_CASE("identical specs produce identical csv") {
  const SweepSpec spec = small_spec();
  const std::string a = results_to_csv(run_sweep(spec));
  const std::string b = results_to_csv(run_sweep(spec));
  CHECK(!a.empty());
  CHECK(a == b);
}

TEST_CASE("workload sweep honors segment targets") {
  SweepSpec spec = small_spec();
  spec.kind = SweepKind::workload_size;
  spec.values = {100, 150};
  spec.methods = {MethodKind::RobustFFDN};
  const auto results = run_sweep(spec);
  REQUIRE(results.size() == 2);
  CHECK(results[0].total_segments == 200);  // 100 x 2 traces
  CHECK(results[1].total_segments == 300);
}

TEST_CASE("csv layout") {
  AggregateResult r;
  r.kind = SweepKind::cache_level;
  r.point = 0.3;
  r.method = MethodKind::RobustFFDN;
  r.trace_count = 1;
  r.mean_miss_rate = 0.125;
  r.ci_half_width = std::nullopt;  // single trace: empty field
  r.total_segments = 8;
  r.local_cache = 4;
  r.on_demand = 2;
  r.remote_fdn = 1;
  r.remote_cloud = 1;

  const std::string csv = results_to_csv({r});
  CHECK(csv ==
        "sweep_kind,sweep_point,method,trace_count,mean_miss_rate,"
        "ci_half_width,total_segments,local_cache,on_demand,remote_fdn,"
        "remote_cloud\n"
        "cache_level,0.3,robust_ffdn,1,0.125000000,,8,4,2,1,1\n");

  r.trace_count = 2;
  r.ci_half_width = 0.01;
  const std::string with_ci = results_to_csv({r});
  CHECK(with_ci.find(",0.125000000,0.010000000,8,") != std::string::npos);
}

TEST_CASE("robustness validation agrees with Monte Carlo") {
  const auto report = validate_robustness(5, 20000, 3);
  CHECK(report.max_dev_local < 0.02);
  CHECK(report.max_dev_on_demand < 0.02);
  CHECK(report.max_dev_remote < 0.02);
  CHECK(report.max_dev() >= report.max_dev_local);
  CHECK(report.max_dev() > 0.0);  // finite sampling never matches exactly

  CHECK_THROWS_AS(validate_robustness(1, 100, 3), std::invalid_argument);
}

TEST_CASE("sweep spec file loading") {
  const std::string path = "sweep_spec_test.json";
  {
    std::ofstream out(path);
    out << R"({
      "kind": "edge_latency",
      "values": [0.25, 0.5, 1.0],
      "methods": ["robust_ffdn", "deterministic_ffdn"],
      "trace_count": 5,
      "base_seed": 123
    })";
  }
  const auto spec = load_sweep_spec(path);
  CHECK(spec.kind == SweepKind::edge_latency);
  CHECK(spec.values == std::vector<double>{0.25, 0.5, 1.0});
  REQUIRE(spec.methods.size() == 2);
  CHECK(spec.methods[0] == MethodKind::RobustFFDN);
  CHECK(spec.methods[1] == MethodKind::DeterministicFFDN);
  CHECK(spec.trace_count == 5);
  CHECK(spec.base_seed == 123);
  CHECK(spec.scenario.name == default_scenario().name);
  std::remove(path.c_str());

  CHECK_THROWS(load_sweep_spec("no_such_spec.json"));
}

TEST_CASE("scenario json round trip") {
  const Scenario sc = default_scenario();
  const std::string j1 = scenario_to_json(sc);
  const Scenario back = scenario_from_json(j1);
  CHECK(scenario_to_json(back) == j1);
  CHECK(back.nodes.size() == sc.nodes.size());
  CHECK(back.links.size() == sc.links.size());
  CHECK(back.cache.fraction == sc.cache.fraction);
  CHECK(back.trace_defaults.target_segments ==
        sc.trace_defaults.target_segments);
}

TEST_CASE("edge latency scaling preserves shape") {
  Scenario sc = default_scenario();
  const double base = sc.edge_latency_baseline();
  CHECK(base > 0.0);

  std::vector<double> cv;
  std::vector<double> cloud_means;
  for (const auto& l : sc.links) {
    if (l.edge && l.propagation_model.mean > 0) {
      cv.push_back(l.propagation_model.stddev / l.propagation_model.mean);
    }
    if (!l.edge) {
      cloud_means.push_back(l.propagation_model.mean);
    }
  }

  sc.scale_edge_latency(2.0);
  CHECK(sc.edge_latency_baseline() == doctest::Approx(2.0 * base));
  std::size_t ci = 0, ei = 0;
  for (const auto& l : sc.links) {
    if (l.edge && l.propagation_model.mean > 0) {
      CHECK(l.propagation_model.stddev / l.propagation_model.mean ==
            doctest::Approx(cv[ei++]));  // coefficient of variation kept
    }
    if (!l.edge) {
      CHECK(l.propagation_model.mean == doctest::Approx(cloud_means[ci++]));
    }
  }
}
