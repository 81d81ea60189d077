#include "ffdn/policies.hpp"

#include <algorithm>

namespace ffdn {

MethodTraits method_traits(MethodKind method) {
  switch (method) {
    case MethodKind::CentralCloud:
      return {false, false, false, false};
    case MethodKind::CDN:
      return {true, false, false, false};
    case MethodKind::FederatedCDN:
      return {true, true, false, true};
    case MethodKind::IsolatedFDN:
      return {true, false, true, true};
    case MethodKind::DeterministicFFDN:
      return {true, true, true, false};
    case MethodKind::RobustFFDN:
      return {true, true, true, true};
  }
  throw std::logic_error("unknown method");
}

std::string method_name(MethodKind method) {
  switch (method) {
    case MethodKind::CentralCloud:
      return "central_cloud";
    case MethodKind::CDN:
      return "cdn";
    case MethodKind::FederatedCDN:
      return "federated_cdn";
    case MethodKind::IsolatedFDN:
      return "isolated_fdn";
    case MethodKind::DeterministicFFDN:
      return "deterministic_ffdn";
    case MethodKind::RobustFFDN:
      return "robust_ffdn";
  }
  throw std::logic_error("unknown method");
}

MethodKind method_from_name(const std::string& name) {
  for (MethodKind m : all_methods()) {
    if (method_name(m) == name) {
      return m;
    }
  }
  throw ConfigError("unknown method name: " + name);
}

const std::vector<MethodKind>& all_methods() {
  static const std::vector<MethodKind> methods = {
      MethodKind::CentralCloud,      MethodKind::CDN,
      MethodKind::FederatedCDN,      MethodKind::IsolatedFDN,
      MethodKind::DeterministicFFDN, MethodKind::RobustFFDN,
  };
  return methods;
}

namespace {

const LinkSpec& require_link(const DecisionContext& ctx,
                             const std::string& from, const std::string& to) {
  const LinkSpec* link = ctx.scenario->find_link(from, to);
  if (link == nullptr) {
    throw ConfigError("missing link " + from + " -> " + to);
  }
  return *link;
}

ChoiceEstimate finish(const DeliveryChoice& choice, const GaussianModel& model,
                      const DecisionContext& ctx) {
  return ChoiceEstimate{choice, model, cdf_at(model, ctx.deadline - ctx.now)};
}

}  // namespace

ChoiceEstimate estimate_local(const Segment& segment,
                              const DecisionContext& ctx) {
  if (!ctx.cache->holds(ctx.local_fdn, segment.video_id, segment.index)) {
    throw std::logic_error("estimate_local: segment not in local cache");
  }
  const LinkSpec& link = require_link(ctx, ctx.local_fdn, ctx.viewer);
  return finish({DeliveryChoice::Kind::LocalCache, "", false},
                transfer_model(segment, link), ctx);
}

std::optional<ChoiceEstimate> estimate_on_demand(const Segment& segment,
                                                 const DecisionContext& ctx) {
  const NodeSpec* node = ctx.scenario->find_node(ctx.local_fdn);
  if (node == nullptr) {
    throw ConfigError("unknown node " + ctx.local_fdn);
  }
  if (node->worker_count <= 0) {
    return std::nullopt;
  }
  const LinkSpec& link = require_link(ctx, ctx.local_fdn, ctx.viewer);
  GaussianModel model =
      convolve(segment.processing_model, transfer_model(segment, link));
  if (ctx.queue_aware) {
    model = GaussianModel(model.mean + ctx.on_demand_backlog_s, model.stddev);
  }
  return finish({DeliveryChoice::Kind::OnDemand, "", false}, model, ctx);
}

ChoiceEstimate estimate_remote(const Segment& segment,
                               const std::string& source,
                               const DecisionContext& ctx) {
  const NodeSpec* node = ctx.scenario->find_node(source);
  if (node == nullptr) {
    throw ConfigError("unknown node " + source);
  }
  if (node->kind != NodeKind::central_cloud &&
      !ctx.cache->holds(source, segment.video_id, segment.index)) {
    throw std::logic_error("estimate_remote: source does not hold segment");
  }
  const LinkSpec& fetch = require_link(ctx, source, ctx.local_fdn);
  const LinkSpec& last = require_link(ctx, ctx.local_fdn, ctx.viewer);
  const GaussianModel model =
      convolve(transfer_model(segment, fetch), transfer_model(segment, last));
  return finish({DeliveryChoice::Kind::RemoteFetch, source, false}, model,
                ctx);
}

ChoiceEstimate estimate_direct_cloud(const Segment& segment,
                                     const DecisionContext& ctx) {
  const std::string cloud = ctx.scenario->cloud_id();
  const LinkSpec& link = require_link(ctx, cloud, ctx.viewer);
  return finish({DeliveryChoice::Kind::RemoteFetch, cloud, true},
                transfer_model(segment, link), ctx);
}

std::vector<ChoiceEstimate> enumerate_choices(const Segment& segment,
                                              const DecisionContext& ctx,
                                              bool allow_neighbors,
                                              bool allow_on_demand) {
  std::vector<ChoiceEstimate> choices;
  if (allow_on_demand) {
    if (auto est = estimate_on_demand(segment, ctx)) {
      choices.push_back(std::move(*est));
    }
  }
  if (allow_neighbors) {
    for (const std::string& fdn : ctx.scenario->fdn_ids()) {
      if (fdn == ctx.local_fdn) {
        continue;
      }
      if (ctx.cache->holds(fdn, segment.video_id, segment.index)) {
        choices.push_back(estimate_remote(segment, fdn, ctx));
      }
    }
  }
  const std::string cloud = ctx.scenario->cloud_id();
  if (ctx.scenario->find_link(cloud, ctx.local_fdn) != nullptr) {
    choices.push_back(estimate_remote(segment, cloud, ctx));
  }
  return choices;
}

namespace {

// Fixed preference for exact ties: OnDemand before RemoteFetch, remote
// sources ordered by id.
bool tie_before(const ChoiceEstimate& a, const ChoiceEstimate& b) {
  if (a.delivery_model.mean != b.delivery_model.mean) {
    return a.delivery_model.mean < b.delivery_model.mean;
  }
  const bool a_od = a.choice.kind == DeliveryChoice::Kind::OnDemand;
  const bool b_od = b.choice.kind == DeliveryChoice::Kind::OnDemand;
  if (a_od != b_od) {
    return a_od;
  }
  return a.choice.source < b.choice.source;
}

DeliveryChoice select(const Segment& segment, const DecisionContext& ctx,
                      bool allow_neighbors, bool allow_on_demand,
                      bool by_robustness) {
  if (ctx.cache->holds(ctx.local_fdn, segment.video_id, segment.index)) {
    return {DeliveryChoice::Kind::LocalCache, "", false};
  }
  const auto choices =
      enumerate_choices(segment, ctx, allow_neighbors, allow_on_demand);
  if (choices.empty()) {
    throw UnservableSegment("no feasible delivery choice for segment " +
                            segment.video_id + "/" +
                            std::to_string(segment.index));
  }
  const ChoiceEstimate* best = &choices.front();
  for (const auto& c : choices) {
    if (&c == best) {
      continue;
    }
    if (by_robustness) {
      if (c.robustness > best->robustness ||
          (c.robustness == best->robustness && tie_before(c, *best))) {
        best = &c;
      }
    } else {
      if (tie_before(c, *best)) {
        best = &c;
      }
    }
  }
  return best->choice;
}

}  // namespace

DeliveryChoice decide_robust(const Segment& segment,
                             const DecisionContext& ctx) {
  return select(segment, ctx, true, true, true);
}

DeliveryChoice decide_deterministic(const Segment& segment,
                                    const DecisionContext& ctx) {
  return select(segment, ctx, true, true, false);
}

DeliveryChoice decide(MethodKind method, const Segment& segment,
                      const DecisionContext& ctx) {
  switch (method) {
    case MethodKind::CentralCloud:
      return estimate_direct_cloud(segment, ctx).choice;
    case MethodKind::CDN:
      if (ctx.cache->holds(ctx.local_fdn, segment.video_id, segment.index)) {
        return {DeliveryChoice::Kind::LocalCache, "", false};
      }
      return estimate_remote(segment, ctx.scenario->cloud_id(), ctx).choice;
    case MethodKind::FederatedCDN:
      return select(segment, ctx, true, false, true);
    case MethodKind::IsolatedFDN:
      return select(segment, ctx, false, true, true);
    case MethodKind::DeterministicFFDN:
      return decide_deterministic(segment, ctx);
    case MethodKind::RobustFFDN:
      return decide_robust(segment, ctx);
  }
  throw std::logic_error("unknown method");
}

}  // namespace ffdn
