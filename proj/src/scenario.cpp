#include "ffdn/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ffdn {

using nlohmann::json;

const NodeSpec* Scenario::find_node(const std::string& id) const {
  for (const auto& n : nodes) {
    if (n.id == id) {
      return &n;
    }
  }
  return nullptr;
}

const LinkSpec* Scenario::find_link(const std::string& from,
                                    const std::string& to) const {
  for (const auto& l : links) {
    if (l.from == from && l.to == to) {
      return &l;
    }
  }
  return nullptr;
}

std::vector<std::string> Scenario::fdn_ids() const {
  std::vector<std::string> out;
  for (const auto& n : nodes) {
    if (n.kind == NodeKind::fdn) {
      out.push_back(n.id);
    }
  }
  return out;
}

std::string Scenario::cloud_id() const {
  for (const auto& n : nodes) {
    if (n.kind == NodeKind::central_cloud) {
      return n.id;
    }
  }
  throw std::runtime_error("scenario has no central cloud node");
}

double Scenario::edge_latency_baseline() const {
  double sum = 0.0;
  int count = 0;
  for (const auto& l : links) {
    if (l.edge) {
      sum += l.propagation_model.mean;
      ++count;
    }
  }
  if (count == 0) {
    throw std::runtime_error("scenario has no edge links");
  }
  return sum / count;
}

void Scenario::scale_edge_latency(double factor) {
  for (auto& l : links) {
    if (l.edge) {
      l.propagation_model = GaussianModel(l.propagation_model.mean * factor,
                                          l.propagation_model.stddev * factor);
    }
  }
}

Scenario default_scenario() {
  Scenario sc;
  sc.name = "ffdn-default";
  sc.nodes = {
      {"cloud", NodeKind::central_cloud, 0},
      {"fdn0", NodeKind::fdn, 7},
      {"fdn1", NodeKind::fdn, 7},
      {"fdn2", NodeKind::fdn, 7},
  };
  sc.viewers = {{"v0", "fdn0"}};
  sc.links = {
      // local FDN to viewer
      {"fdn0", "v0", GaussianModel(0.10, 0.05), 4.0e9, 0.1, true},
      // neighbors toward the ingest FDN: fdn1 is steady, fdn2 is
      // nominally faster but jittery
      {"fdn1", "fdn0", GaussianModel(0.35, 0.05), 1.0e9, 0.1, true},
      {"fdn2", "fdn0", GaussianModel(0.33, 0.37), 1.0e9, 0.1, true},
      // distant cloud over a thin shared pipe
      {"cloud", "fdn0", GaussianModel(1.50, 0.30), 1.0e8, 0.1, false},
      {"cloud", "v0", GaussianModel(1.80, 0.36), 1.0e8, 0.1, false},
  };
  sc.catalog = CatalogParams{};
  sc.cache = CacheParams{};
  sc.trace_defaults.window = 180.0;
  sc.trace_defaults.target_segments = 3500;
  sc.trace_defaults.popularity = {PopularityKind::zipf, 0.8};
  sc.trace_defaults.startup_delay = 1.0;
  sc.trace_defaults.viewers = sc.viewers;
  return sc;
}

namespace {

json gaussian_to_json(const GaussianModel& g) {
  return json{{"mean_s", g.mean}, {"stddev_s", g.stddev}};
}

GaussianModel gaussian_from_json(const json& j) {
  return GaussianModel(j.at("mean_s").get<double>(),
                       j.at("stddev_s").get<double>());
}

std::string popularity_to_string(const PopularityRule& p) {
  return p.kind == PopularityKind::uniform ? "uniform" : "zipf";
}

PopularityRule popularity_from_json(const json& j) {
  PopularityRule p;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform") {
    p.kind = PopularityKind::uniform;
  } else if (kind == "zipf") {
    p.kind = PopularityKind::zipf;
    p.zipf_s = j.at("s").get<double>();
  } else {
    throw std::runtime_error("unknown popularity kind: " + kind);
  }
  return p;
}

json popularity_to_json(const PopularityRule& p) {
  json j{{"kind", popularity_to_string(p)}};
  if (p.kind == PopularityKind::zipf) {
    j["s"] = p.zipf_s;
  }
  return j;
}

}  // namespace

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["name"] = sc.name;
  j["nodes"] = json::array();
  for (const auto& n : sc.nodes) {
    j["nodes"].push_back(
        {{"id", n.id},
         {"kind", n.kind == NodeKind::central_cloud ? "central_cloud" : "fdn"},
         {"workers", n.worker_count}});
  }
  j["viewers"] = json::array();
  for (const auto& [id, fdn] : sc.viewers) {
    j["viewers"].push_back({{"id", id}, {"local_fdn", fdn}});
  }
  j["links"] = json::array();
  for (const auto& l : sc.links) {
    j["links"].push_back({{"from", l.from},
                          {"to", l.to},
                          {"propagation", gaussian_to_json(l.propagation_model)},
                          {"capacity_bps", l.capacity_bps},
                          {"serialization_cv", l.serialization_cv},
                          {"edge", l.edge}});
  }
  j["catalog"] = {{"videos", sc.catalog.video_count},
                  {"min_gops", sc.catalog.min_gops},
                  {"max_gops", sc.catalog.max_gops},
                  {"gop_duration_s", sc.catalog.gop_duration_s},
                  {"min_size_bits", sc.catalog.min_size_bits},
                  {"max_size_bits", sc.catalog.max_size_bits},
                  {"proc_mean_min_s", sc.catalog.proc_mean_min_s},
                  {"proc_mean_max_s", sc.catalog.proc_mean_max_s},
                  {"proc_cv", sc.catalog.proc_cv},
                  {"seed", sc.catalog.seed}};
  j["cache"] = {{"fraction", sc.cache.fraction},
                {"granularity",
                 sc.cache.granularity == CacheGranularity::per_segment
                     ? "per_segment"
                     : "per_video"},
                {"bias", popularity_to_json(sc.cache.bias)},
                {"cdn_video_fraction", sc.cache.cdn_video_fraction},
                {"seed", sc.cache.seed}};
  j["trace"] = {{"window_s", sc.trace_defaults.window},
                {"request_count", sc.trace_defaults.request_count},
                {"target_segments", sc.trace_defaults.target_segments},
                {"popularity", popularity_to_json(sc.trace_defaults.popularity)},
                {"startup_delay_s", sc.trace_defaults.startup_delay}};
  j["flags"] = {{"queue_aware", sc.flags.queue_aware},
                {"just_in_time", sc.flags.just_in_time}};
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  const json j = json::parse(text);
  Scenario sc;
  sc.name = j.at("name").get<std::string>();
  sc.nodes.clear();
  for (const auto& n : j.at("nodes")) {
    NodeSpec spec;
    spec.id = n.at("id").get<std::string>();
    const std::string kind = n.at("kind").get<std::string>();
    if (kind == "central_cloud") {
      spec.kind = NodeKind::central_cloud;
    } else if (kind == "fdn") {
      spec.kind = NodeKind::fdn;
    } else {
      throw std::runtime_error("unknown node kind: " + kind);
    }
    spec.worker_count = n.at("workers").get<int>();
    sc.nodes.push_back(std::move(spec));
  }
  sc.viewers.clear();
  for (const auto& v : j.at("viewers")) {
    sc.viewers.emplace_back(v.at("id").get<std::string>(),
                            v.at("local_fdn").get<std::string>());
  }
  sc.links.clear();
  for (const auto& l : j.at("links")) {
    LinkSpec spec;
    spec.from = l.at("from").get<std::string>();
    spec.to = l.at("to").get<std::string>();
    spec.propagation_model = gaussian_from_json(l.at("propagation"));
    spec.capacity_bps = l.at("capacity_bps").get<double>();
    spec.serialization_cv = l.at("serialization_cv").get<double>();
    spec.edge = l.at("edge").get<bool>();
    sc.links.push_back(std::move(spec));
  }
  const auto& cat = j.at("catalog");
  sc.catalog.video_count = cat.at("videos").get<int>();
  sc.catalog.min_gops = cat.at("min_gops").get<int>();
  sc.catalog.max_gops = cat.at("max_gops").get<int>();
  sc.catalog.gop_duration_s = cat.at("gop_duration_s").get<double>();
  sc.catalog.min_size_bits = cat.at("min_size_bits").get<double>();
  sc.catalog.max_size_bits = cat.at("max_size_bits").get<double>();
  sc.catalog.proc_mean_min_s = cat.at("proc_mean_min_s").get<double>();
  sc.catalog.proc_mean_max_s = cat.at("proc_mean_max_s").get<double>();
  sc.catalog.proc_cv = cat.at("proc_cv").get<double>();
  sc.catalog.seed = cat.at("seed").get<std::uint64_t>();
  const auto& cache = j.at("cache");
  sc.cache.fraction = cache.at("fraction").get<double>();
  const std::string gran = cache.at("granularity").get<std::string>();
  sc.cache.granularity = gran == "per_video" ? CacheGranularity::per_video
                                             : CacheGranularity::per_segment;
  sc.cache.bias = popularity_from_json(cache.at("bias"));
  sc.cache.cdn_video_fraction = cache.at("cdn_video_fraction").get<double>();
  sc.cache.seed = cache.at("seed").get<std::uint64_t>();
  const auto& tr = j.at("trace");
  sc.trace_defaults.window = tr.at("window_s").get<double>();
  sc.trace_defaults.request_count = tr.at("request_count").get<long>();
  sc.trace_defaults.target_segments = tr.at("target_segments").get<long>();
  sc.trace_defaults.popularity = popularity_from_json(tr.at("popularity"));
  sc.trace_defaults.startup_delay = tr.at("startup_delay_s").get<double>();
  sc.trace_defaults.viewers = sc.viewers;
  const auto& fl = j.at("flags");
  sc.flags.queue_aware = fl.at("queue_aware").get<bool>();
  sc.flags.just_in_time = fl.at("just_in_time").get<bool>();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_scenario: cannot open " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_scenario: cannot open " + path);
  }
  out << scenario_to_json(scenario);
}

}  // namespace ffdn
