#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ffdn/model.hpp"

namespace ffdn {

struct ScenarioFlags {
  // Shift the on-demand estimate by the current worker backlog.
  bool queue_aware = false;
  // Re-decide each segment one GOP duration before its deadline instead
  // of at request arrival.
  bool just_in_time = false;
};

struct CacheParams {
  double fraction = 0.3;
  CacheGranularity granularity = CacheGranularity::per_segment;
  PopularityRule bias{PopularityKind::zipf, 0.8};
  double cdn_video_fraction = 0.75;  // whole-video caching level for CDN
  std::uint64_t seed = 11;
};

// Full description of one simulated deployment: topology, catalog
// parameters, cache parameters, default trace parameters and engine
// flags. Round-trips losslessly through JSON.
struct Scenario {
  std::string name = "default";
  std::vector<NodeSpec> nodes;
  std::vector<std::pair<std::string, std::string>> viewers;  // (id, local fdn)
  std::vector<LinkSpec> links;
  CatalogParams catalog;
  CacheParams cache;
  TraceParams trace_defaults;
  ScenarioFlags flags;

  const NodeSpec* find_node(const std::string& id) const;
  const LinkSpec* find_link(const std::string& from,
                            const std::string& to) const;
  std::vector<std::string> fdn_ids() const;
  std::string cloud_id() const;

  // Average propagation mean over edge-marked links; the reference point
  // for edge-latency sweeps.
  double edge_latency_baseline() const;
  void scale_edge_latency(double factor);
};

// 3 FDNs + central cloud, requests ingested at fdn0; the scenario every
// CLI command and the acceptance experiments fall back to.
Scenario default_scenario();

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);

}  // namespace ffdn
