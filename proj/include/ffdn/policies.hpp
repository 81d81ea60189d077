#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffdn/model.hpp"
#include "ffdn/scenario.hpp"

namespace ffdn {

enum class MethodKind {
  CentralCloud,
  CDN,
  FederatedCDN,
  IsolatedFDN,
  DeterministicFFDN,
  RobustFFDN,
};

struct MethodTraits {
  bool edge_caching;
  bool federated;
  bool on_demand;
  bool robustness;
};

MethodTraits method_traits(MethodKind method);
std::string method_name(MethodKind method);
MethodKind method_from_name(const std::string& name);
const std::vector<MethodKind>& all_methods();

// How one segment reaches the viewer.
struct DeliveryChoice {
  enum class Kind { LocalCache, OnDemand, RemoteFetch };
  Kind kind = Kind::LocalCache;
  std::string source;  // RemoteFetch only: the node holding the segment
  // RemoteFetch only: deliver straight to the viewer in one hop instead
  // of store-and-forward through the local FDN.
  bool direct = false;
};

struct ChoiceEstimate {
  DeliveryChoice choice;
  GaussianModel delivery_model;  // end-to-end latency distribution
  double robustness = 0.0;       // P(delivered within deadline - now)
};

// Immutable snapshot a decision is made against.
struct DecisionContext {
  const Scenario* scenario = nullptr;
  const CachePlan* cache = nullptr;
  std::string local_fdn;
  std::string viewer;
  double now = 0.0;
  double deadline = 0.0;
  // Estimated seconds of queued work per worker at the local FDN; only
  // consulted when queue_aware is set.
  double on_demand_backlog_s = 0.0;
  bool queue_aware = false;
};

class UnservableSegment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Choice (A): stream from the local FDN's cache.
ChoiceEstimate estimate_local(const Segment& segment,
                              const DecisionContext& ctx);

// Choice (B): process on the local FDN, then stream. Empty when the
// local FDN has no workers.
std::optional<ChoiceEstimate> estimate_on_demand(const Segment& segment,
                                                 const DecisionContext& ctx);

// Choice (C): fetch from `source` (a neighbor's cache or the cloud),
// store-and-forward through the local FDN, then stream.
ChoiceEstimate estimate_remote(const Segment& segment,
                               const std::string& source,
                               const DecisionContext& ctx);

// Single-hop cloud-to-viewer delivery (the Central Cloud method).
ChoiceEstimate estimate_direct_cloud(const Segment& segment,
                                     const DecisionContext& ctx);

// Every feasible non-local choice for the segment under the given
// capability flags, in deterministic order.
std::vector<ChoiceEstimate> enumerate_choices(const Segment& segment,
                                              const DecisionContext& ctx,
                                              bool allow_neighbors,
                                              bool allow_on_demand);

// Maximum-robustness selection; a local cache hit short-circuits.
// Ties: smaller delivery mean, then OnDemand before RemoteFetch ordered
// by source id.
DeliveryChoice decide_robust(const Segment& segment,
                             const DecisionContext& ctx);

// Same candidate set, minimum-mean selection.
DeliveryChoice decide_deterministic(const Segment& segment,
                                    const DecisionContext& ctx);

DeliveryChoice decide(MethodKind method, const Segment& segment,
                      const DecisionContext& ctx);

}  // namespace ffdn
