#include "ffdn/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ffdn {

void CachePlan::insert(const std::string& node, const std::string& video,
                       int seg) {
  entries_[node].emplace(video, seg);
}

bool CachePlan::holds(const std::string& node, const std::string& video,
                      int seg) const {
  auto it = entries_.find(node);
  if (it == entries_.end()) {
    return false;
  }
  return it->second.count({video, seg}) > 0;
}

std::size_t CachePlan::count(const std::string& node) const {
  auto it = entries_.find(node);
  return it == entries_.end() ? 0 : it->second.size();
}

PopularitySampler::PopularitySampler(std::size_t n,
                                     const PopularityRule& rule) {
  if (n == 0) {
    throw std::invalid_argument("PopularitySampler: empty item set");
  }
  weights_.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    weights_[r] = rule.kind == PopularityKind::uniform
                      ? 1.0
                      : std::pow(static_cast<double>(r + 1), -rule.zipf_s);
  }
  cdf_.resize(n);
  std::partial_sum(weights_.begin(), weights_.end(), cdf_.begin());
}

std::size_t PopularitySampler::sample(SeededRng& rng) const {
  const double u = rng.uniform01() * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t idx = static_cast<std::size_t>(it - cdf_.begin());
  return idx < cdf_.size() ? idx : cdf_.size() - 1;
}

double PopularitySampler::weight(std::size_t rank) const {
  return weights_.at(rank);
}

GaussianModel transfer_model(const Segment& segment, const LinkSpec& link) {
  if (link.capacity_bps <= 0.0) {
    throw std::invalid_argument("transfer_model: capacity must be positive");
  }
  const double ser_mean = segment.size_bits / link.capacity_bps;
  const GaussianModel serialization(ser_mean, link.serialization_cv * ser_mean);
  return convolve(link.propagation_model, serialization);
}

std::vector<double> assign_deadlines(const StreamRequest& request,
                                     const VideoAsset& video) {
  if (video.id != request.video_id) {
    throw std::invalid_argument("assign_deadlines: video/request mismatch");
  }
  std::size_t n = video.segments.size();
  if (request.segment_limit >= 0 &&
      static_cast<std::size_t>(request.segment_limit) < n) {
    n = static_cast<std::size_t>(request.segment_limit);
  }
  std::vector<double> deadlines;
  deadlines.reserve(n);
  double playback = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    deadlines.push_back(request.arrival_time + request.startup_delay +
                        playback);
    playback += video.segments[i].gop_duration;
  }
  return deadlines;
}

std::vector<VideoAsset> generate_catalog(const CatalogParams& params) {
  SeededRng rng(params.seed);
  std::vector<VideoAsset> catalog;
  catalog.reserve(static_cast<std::size_t>(params.video_count));
  for (int v = 0; v < params.video_count; ++v) {
    VideoAsset asset;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "vid%03d", v);
    asset.id = buf;
    const int gops =
        params.min_gops +
        static_cast<int>(rng.uniform_index(
            static_cast<std::uint64_t>(params.max_gops - params.min_gops + 1)));
    asset.segments.reserve(static_cast<std::size_t>(gops));
    for (int i = 0; i < gops; ++i) {
      Segment seg;
      seg.video_id = asset.id;
      seg.index = i;
      seg.size_bits = rng.uniform(params.min_size_bits, params.max_size_bits);
      seg.gop_duration = params.gop_duration_s;
      const double mean =
          rng.uniform(params.proc_mean_min_s, params.proc_mean_max_s);
      seg.processing_model = GaussianModel(mean, params.proc_cv * mean);
      asset.segments.push_back(std::move(seg));
    }
    catalog.push_back(std::move(asset));
  }
  return catalog;
}

long catalog_total_segments(const std::vector<VideoAsset>& catalog) {
  long total = 0;
  for (const auto& v : catalog) {
    total += static_cast<long>(v.segments.size());
  }
  return total;
}

WorkloadTrace generate_trace(const TraceParams& params,
                             const std::vector<VideoAsset>& catalog,
                             std::uint64_t seed) {
  const bool by_segments = params.target_segments > 0;
  const long wanted = by_segments ? params.target_segments
                                  : params.request_count;
  if (wanted > 0 && catalog.empty()) {
    throw std::invalid_argument("generate_trace: empty catalog");
  }
  if (wanted > 0 && params.viewers.empty()) {
    throw std::invalid_argument("generate_trace: no viewers defined");
  }

  WorkloadTrace trace;
  trace.window = params.window;
  trace.seed = seed;

  SeededRng rng(seed);
  PopularitySampler videos(catalog.size(), params.popularity);

  long emitted_requests = 0;
  long emitted_segments = 0;
  while (by_segments ? emitted_segments < wanted
                     : emitted_requests < wanted) {
    StreamRequest req;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "r%05ld", emitted_requests);
    req.id = buf;
    req.arrival_time = rng.uniform(0.0, params.window);
    const std::size_t vidx = videos.sample(rng);
    req.video_id = catalog[vidx].id;
    const std::size_t widx =
        params.viewers.size() == 1
            ? 0
            : static_cast<std::size_t>(
                  rng.uniform_index(params.viewers.size()));
    req.viewer_id = params.viewers[widx].first;
    req.local_fdn = params.viewers[widx].second;
    req.startup_delay = params.startup_delay;

    long segs = static_cast<long>(catalog[vidx].segments.size());
    if (by_segments && emitted_segments + segs > wanted) {
      segs = wanted - emitted_segments;  // truncate the last video
      req.segment_limit = static_cast<int>(segs);
    }
    emitted_segments += segs;
    ++emitted_requests;
    trace.requests.push_back(std::move(req));
  }
  trace.total_segments = emitted_segments;
  return trace;
}

namespace {

// Weighted sampling without replacement via exponential sort keys:
// item order is ascending in -log(1-u)/w.
struct Keyed {
  double key;
  std::size_t index;
};

std::vector<std::size_t> weighted_order(const std::vector<double>& weights,
                                        SeededRng& rng) {
  std::vector<Keyed> keyed;
  keyed.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double u = rng.uniform01();
    keyed.push_back({-std::log1p(-u) / weights[i], i});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.key != b.key) return a.key < b.key;
    return a.index < b.index;
  });
  std::vector<std::size_t> order;
  order.reserve(keyed.size());
  for (const auto& k : keyed) {
    order.push_back(k.index);
  }
  return order;
}

}  // namespace

CachePlan build_cache_plan(const std::vector<NodeSpec>& nodes,
                           const std::vector<VideoAsset>& catalog,
                           double cache_fraction, CacheGranularity granularity,
                           const PopularityRule& popularity_bias,
                           std::uint64_t seed) {
  if (cache_fraction < 0.0 || cache_fraction > 1.0) {
    throw std::invalid_argument("build_cache_plan: fraction must be in [0,1]");
  }
  const long total = catalog_total_segments(catalog);
  const long budget = static_cast<long>(
      std::floor(cache_fraction * static_cast<double>(total)));

  PopularitySampler pop(catalog.empty() ? 1 : catalog.size(), popularity_bias);

  CachePlan plan;
  std::uint64_t node_index = 0;
  for (const auto& node : nodes) {
    ++node_index;
    if (node.kind != NodeKind::fdn) {
      continue;  // the cloud's cache is implicit
    }
    if (budget == 0 || catalog.empty()) {
      continue;
    }
    SeededRng rng(derive_seed(seed, node_index));
    if (granularity == CacheGranularity::per_segment) {
      std::vector<double> weights;
      std::vector<std::pair<std::size_t, int>> items;  // (video idx, seg)
      for (std::size_t v = 0; v < catalog.size(); ++v) {
        for (const auto& seg : catalog[v].segments) {
          weights.push_back(pop.weight(v));
          items.emplace_back(v, seg.index);
        }
      }
      const auto order = weighted_order(weights, rng);
      for (long i = 0; i < budget && i < static_cast<long>(order.size());
           ++i) {
        const auto& [v, s] = items[order[static_cast<std::size_t>(i)]];
        plan.insert(node.id, catalog[v].id, s);
      }
    } else {
      std::vector<double> weights;
      weights.reserve(catalog.size());
      for (std::size_t v = 0; v < catalog.size(); ++v) {
        weights.push_back(pop.weight(v));
      }
      const auto order = weighted_order(weights, rng);
      long cached = 0;
      for (std::size_t v : order) {
        if (cached >= budget) {
          break;
        }
        for (const auto& seg : catalog[v].segments) {
          plan.insert(node.id, catalog[v].id, seg.index);
        }
        cached += static_cast<long>(catalog[v].segments.size());
      }
    }
  }
  return plan;
}

void write_trace(const WorkloadTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_trace: cannot open " + path);
  }
  char buf[64];
  out << "# request_id arrival_time_s video_id viewer_id local_fdn"
         " startup_delay_s [segment_limit]\n";
  out << "# window_s=";
  std::snprintf(buf, sizeof(buf), "%.17g", trace.window);
  out << buf << " seed=" << trace.seed << "\n";
  for (const auto& r : trace.requests) {
    out << r.id << ' ';
    std::snprintf(buf, sizeof(buf), "%.17g", r.arrival_time);
    out << buf << ' ' << r.video_id << ' ' << r.viewer_id << ' '
        << r.local_fdn << ' ';
    std::snprintf(buf, sizeof(buf), "%.17g", r.startup_delay);
    out << buf;
    if (r.segment_limit >= 0) {
      out << ' ' << r.segment_limit;
    }
    out << '\n';
  }
}

WorkloadTrace read_trace(const std::string& path,
                         const std::vector<VideoAsset>& catalog) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_trace: cannot open " + path);
  }
  std::map<std::string, const VideoAsset*> by_id;
  for (const auto& v : catalog) {
    by_id[v.id] = &v;
  }

  WorkloadTrace trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string tok;
      while (meta >> tok) {
        if (tok.rfind("window_s=", 0) == 0) {
          trace.window = std::stod(tok.substr(9));
        } else if (tok.rfind("seed=", 0) == 0) {
          trace.seed = std::stoull(tok.substr(5));
        }
      }
      continue;
    }
    std::istringstream ls(line);
    StreamRequest r;
    if (!(ls >> r.id >> r.arrival_time >> r.video_id >> r.viewer_id >>
          r.local_fdn >> r.startup_delay)) {
      throw std::runtime_error("read_trace: malformed line: " + line);
    }
    int limit = -1;
    if (ls >> limit) {
      r.segment_limit = limit;
    }
    auto it = by_id.find(r.video_id);
    if (it == by_id.end()) {
      throw std::runtime_error("read_trace: unknown video " + r.video_id);
    }
    long segs = static_cast<long>(it->second->segments.size());
    if (r.segment_limit >= 0 && r.segment_limit < segs) {
      segs = r.segment_limit;
    }
    trace.total_segments += segs;
    trace.requests.push_back(std::move(r));
  }
  return trace;
}

}  // namespace ffdn
