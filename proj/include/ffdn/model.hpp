#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ffdn/stochastic.hpp"

namespace ffdn {

// One GOP: the unit of caching, processing, transfer and deadline
// accounting.
struct Segment {
  std::string video_id;
  int index = 0;  // 0-based position in the video
  double size_bits = 0.0;
  double gop_duration = 0.0;                // seconds of playback
  GaussianModel processing_model;           // on-demand processing time
};

struct VideoAsset {
  std::string id;
  std::vector<Segment> segments;  // indices 0..n-1, no gaps
};

enum class NodeKind { central_cloud, fdn };

struct NodeSpec {
  std::string id;
  NodeKind kind = NodeKind::fdn;
  int worker_count = 0;  // 0 for nodes without on-demand processing
};

// Directed, capacity-limited link with a stochastic propagation delay.
// The size-dependent serialization term gets a stddev of
// serialization_cv * (size / capacity).
struct LinkSpec {
  std::string from;
  std::string to;
  GaussianModel propagation_model;  // seconds
  double capacity_bps = 1e9;
  double serialization_cv = 0.1;
  bool edge = false;  // member of the edge network (latency sweeps scale it)
};

// Per-node set of cached (video_id, segment index) pairs. The central
// cloud's cache is total by definition and never stored.
class CachePlan {
 public:
  void insert(const std::string& node, const std::string& video, int seg);
  bool holds(const std::string& node, const std::string& video,
             int seg) const;
  std::size_t count(const std::string& node) const;
  const std::map<std::string, std::set<std::pair<std::string, int>>>&
  entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::set<std::pair<std::string, int>>> entries_;
};

struct StreamRequest {
  std::string id;
  std::string video_id;
  std::string viewer_id;
  std::string local_fdn;
  double arrival_time = 0.0;   // seconds from simulation start
  double startup_delay = 0.0;  // slack before the first presentation time
  int segment_limit = -1;      // <0: stream the whole video
};

struct WorkloadTrace {
  std::vector<StreamRequest> requests;
  double window = 0.0;
  std::uint64_t seed = 0;
  long total_segments = 0;
};

enum class PopularityKind { uniform, zipf };

struct PopularityRule {
  PopularityKind kind = PopularityKind::uniform;
  double zipf_s = 1.0;  // exponent when kind == zipf
};

// Rank-indexed popularity weights; rank 0 is the most popular item.
class PopularitySampler {
 public:
  PopularitySampler(std::size_t n, const PopularityRule& rule);
  std::size_t sample(SeededRng& rng) const;
  double weight(std::size_t rank) const;

 private:
  std::vector<double> cdf_;
  std::vector<double> weights_;
};

// End-to-end one-hop latency model: propagation convolved with the
// serialization term N(size/capacity, cv * size/capacity).
GaussianModel transfer_model(const Segment& segment, const LinkSpec& link);

// Absolute presentation deadlines for every (non-truncated) segment of
// the request's video: arrival + startup + playback time of all earlier
// segments.
std::vector<double> assign_deadlines(const StreamRequest& request,
                                     const VideoAsset& video);

struct CatalogParams {
  int video_count = 20;
  int min_gops = 5;
  int max_gops = 25;
  double gop_duration_s = 2.0;
  double min_size_bits = 2e7;
  double max_size_bits = 6e7;
  double proc_mean_min_s = 0.05;
  double proc_mean_max_s = 0.85;
  double proc_cv = 0.35;  // per-segment processing stddev / mean
  std::uint64_t seed = 7;
};

std::vector<VideoAsset> generate_catalog(const CatalogParams& params);

long catalog_total_segments(const std::vector<VideoAsset>& catalog);

struct TraceParams {
  double window = 180.0;
  long request_count = 0;    // used when target_segments == 0
  long target_segments = 0;  // when > 0, generate until this many segments
  PopularityRule popularity;
  double startup_delay = 2.0;
  // (viewer id, local fdn) bindings; a request picks one uniformly.
  std::vector<std::pair<std::string, std::string>> viewers;
};

WorkloadTrace generate_trace(const TraceParams& params,
                             const std::vector<VideoAsset>& catalog,
                             std::uint64_t seed);

enum class CacheGranularity { per_segment, per_video };

// Per-FDN cache selection at the given fraction of the catalog's total
// segment count. Each node draws from an independent sub-seed so
// neighboring FDNs hold different content.
CachePlan build_cache_plan(const std::vector<NodeSpec>& nodes,
                           const std::vector<VideoAsset>& catalog,
                           double cache_fraction, CacheGranularity granularity,
                           const PopularityRule& popularity_bias,
                           std::uint64_t seed);

// Line-delimited trace files. Columns, space separated:
//   request_id arrival_time_s video_id viewer_id local_fdn startup_delay_s
// plus a trailing segment_limit column when the request is truncated.
void write_trace(const WorkloadTrace& trace, const std::string& path);
WorkloadTrace read_trace(const std::string& path,
                         const std::vector<VideoAsset>& catalog);

}  // namespace ffdn
