#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "ffdn/policies.hpp"

using namespace ffdn;

namespace {

// A link that adds (mean, stddev) and nothing else: serialization is
// driven to zero by a huge capacity.
LinkSpec pure_latency_link(const std::string& from, const std::string& to,
                           double mean, double stddev) {
  LinkSpec l;
  l.from = from;
  l.to = to;
  l.propagation_model = GaussianModel(mean, stddev);
  l.capacity_bps = 1e18;
  l.serialization_cv = 0.0;
  return l;
}

Segment tiny_segment(const GaussianModel& proc) {
  Segment s;
  s.video_id = "vid000";
  s.index = 0;
  s.size_bits = 1.0;
  s.gop_duration = 2.0;
  s.processing_model = proc;
  return s;
}

struct Fixture {
  Scenario sc;
  CachePlan cache;

  Fixture() {
    sc.nodes = {
        {"cloud", NodeKind::central_cloud, 0},
        {"f0", NodeKind::fdn, 3},
        {"f1", NodeKind::fdn, 3},
    };
    sc.viewers = {{"v", "f0"}};
    sc.links = {
        pure_latency_link("f0", "v", 0.0, 0.0),
        pure_latency_link("f1", "f0", 3.5, 0.2),
        pure_latency_link("cloud", "f0", 50.0, 0.0),
        pure_latency_link("cloud", "v", 60.0, 0.0),
    };
  }

  DecisionContext ctx(double now, double deadline) const {
    DecisionContext c;
    c.scenario = &sc;
    c.cache = &cache;
    c.local_fdn = "f0";
    c.viewer = "v";
    c.now = now;
    c.deadline = deadline;
    return c;
  }
};

}  // namespace

TEST_CASE("method capability table") {
  CHECK(method_traits(MethodKind::CentralCloud).edge_caching == false);
  CHECK(method_traits(MethodKind::CDN).edge_caching == true);
  CHECK(method_traits(MethodKind::CDN).robustness == false);
  CHECK(method_traits(MethodKind::FederatedCDN).federated == true);
  CHECK(method_traits(MethodKind::FederatedCDN).on_demand == false);
  CHECK(method_traits(MethodKind::FederatedCDN).robustness == true);
  CHECK(method_traits(MethodKind::IsolatedFDN).federated == false);
  CHECK(method_traits(MethodKind::IsolatedFDN).on_demand == true);
  CHECK(method_traits(MethodKind::DeterministicFFDN).robustness == false);
  CHECK(method_traits(MethodKind::RobustFFDN).federated == true);
  CHECK(method_traits(MethodKind::RobustFFDN).robustness == true);

  for (MethodKind m : all_methods()) {
    CHECK(method_from_name(method_name(m)) == m);
  }
}

TEST_CASE("estimate_local") {
  Fixture f;
  f.sc.links[0] = pure_latency_link("f0", "v", 0.05, 0.01);
  f.sc.links[0].capacity_bps = 1e9;
  f.sc.links[0].serialization_cv = 0.1;
  Segment seg = tiny_segment(GaussianModel(0.3, 0.05));
  seg.size_bits = 1e9;
  f.cache.insert("f0", seg.video_id, seg.index);

  // N(1.05, 0.1005) with slack 1.25 -> Phi(1.990)
  const auto est = estimate_local(seg, f.ctx(0.0, 1.25));
  CHECK(est.choice.kind == DeliveryChoice::Kind::LocalCache);
  CHECK(est.delivery_model.mean == doctest::Approx(1.05));
  CHECK(est.robustness == doctest::Approx(0.9767).epsilon(1e-3));

  // slack equal to the mean -> 0.5
  CHECK(estimate_local(seg, f.ctx(0.0, 1.05)).robustness ==
        doctest::Approx(0.5).epsilon(1e-9));

  // degenerate link faster than the deadline -> certain delivery
  f.sc.links[0] = pure_latency_link("f0", "v", 0.4, 0.0);
  CHECK(estimate_local(seg, f.ctx(0.0, 1.0)).robustness == 1.0);

  // caller bug: segment not cached locally
  CachePlan empty;
  DecisionContext bad = f.ctx(0, 1);
  bad.cache = &empty;
  CHECK_THROWS(estimate_local(seg, bad));
}

TEST_CASE("estimate_on_demand") {
  Fixture f;
  const Segment seg = tiny_segment(GaussianModel(3.0, 1.0));

  // degenerate transfer: robustness at slack == processing mean is 0.5
  auto est = estimate_on_demand(seg, f.ctx(0.0, 3.0));
  REQUIRE(est.has_value());
  CHECK(est->choice.kind == DeliveryChoice::Kind::OnDemand);
  CHECK(est->robustness == doctest::Approx(0.5).epsilon(1e-9));

  // N(3,1) convolved with a fixed 1 s transfer -> N(4,1); Phi(1) at slack 5
  f.sc.links[0] = pure_latency_link("f0", "v", 1.0, 0.0);
  est = estimate_on_demand(seg, f.ctx(0.0, 5.0));
  REQUIRE(est.has_value());
  CHECK(est->delivery_model.mean == doctest::Approx(4.0));
  CHECK(est->robustness == doctest::Approx(0.8413).epsilon(1e-3));

  // no workers -> not applicable
  f.sc.nodes[1].worker_count = 0;
  CHECK_FALSE(estimate_on_demand(seg, f.ctx(0.0, 5.0)).has_value());
}

TEST_CASE("estimate_remote") {
  Fixture f;
  const Segment seg = tiny_segment(GaussianModel(0.5, 0.05));
  f.cache.insert("f1", seg.video_id, seg.index);

  // both hops degenerate 1 s -> N(2,0); slack 3 -> certain
  f.sc.links[0] = pure_latency_link("f0", "v", 1.0, 0.0);
  f.sc.links[1] = pure_latency_link("f1", "f0", 1.0, 0.0);
  auto est = estimate_remote(seg, "f1", f.ctx(0.0, 3.0));
  CHECK(est.delivery_model.mean == doctest::Approx(2.0));
  CHECK(est.delivery_model.stddev == doctest::Approx(0.0));
  CHECK(est.robustness == 1.0);

  // negative slack with a degenerate model -> 0
  CHECK(estimate_remote(seg, "f1", f.ctx(10.0, 9.0)).robustness == 0.0);

  // N(1.5,0.15) (*) N(2.0,0.13) -> N(3.5, 0.19849); slack 4 -> Phi(2.518)
  f.sc.links[0] = pure_latency_link("f0", "v", 2.0, 0.13);
  f.sc.links[1] = pure_latency_link("f1", "f0", 1.5, 0.15);
  est = estimate_remote(seg, "f1", f.ctx(0.0, 4.0));
  CHECK(est.delivery_model.mean == doctest::Approx(3.5));
  CHECK(est.delivery_model.stddev == doctest::Approx(0.19849).epsilon(1e-4));
  CHECK(est.robustness == doctest::Approx(0.9941).epsilon(1e-3));

  // the cloud needs no cache plan entry
  CHECK_NOTHROW(estimate_remote(seg, "cloud", f.ctx(0.0, 60.0)));
  // a non-holder FDN is a caller bug
  CHECK_THROWS(estimate_remote(seg, "f0", f.ctx(0.0, 4.0)));
}

TEST_CASE("decide_robust vs decide_deterministic divergence") {
  // on-demand N(3,1) (r = 0.8413 at slack 4) against a neighbor fetch
  // N(3.5,0.2) (r = 0.9938): robust picks the neighbor, the
  // deterministic method picks the smaller mean.
  Fixture f;
  const Segment seg = tiny_segment(GaussianModel(3.0, 1.0));
  f.cache.insert("f1", seg.video_id, seg.index);

  const auto robust = decide_robust(seg, f.ctx(0.0, 4.0));
  CHECK(robust.kind == DeliveryChoice::Kind::RemoteFetch);
  CHECK(robust.source == "f1");

  const auto det = decide_deterministic(seg, f.ctx(0.0, 4.0));
  CHECK(det.kind == DeliveryChoice::Kind::OnDemand);

  // a local cache hit short-circuits both
  f.cache.insert("f0", seg.video_id, seg.index);
  CHECK(decide_robust(seg, f.ctx(0.0, 4.0)).kind ==
        DeliveryChoice::Kind::LocalCache);
  CHECK(decide_deterministic(seg, f.ctx(0.0, 4.0)).kind ==
        DeliveryChoice::Kind::LocalCache);
}

TEST_CASE("singleton choice set and unservable error") {
  Fixture f;
  // remove the cloud->f0 link so the cloud is not reachable as a source
  f.sc.links.erase(f.sc.links.begin() + 2);
  const Segment seg = tiny_segment(GaussianModel(1.0, 0.1));

  // nothing cached anywhere; workers available -> on-demand is the only
  // feasible choice
  const auto choice = decide_robust(seg, f.ctx(0.0, 4.0));
  CHECK(choice.kind == DeliveryChoice::Kind::OnDemand);

  // no workers either -> unservable
  f.sc.nodes[1].worker_count = 0;
  CHECK_THROWS_AS(decide_robust(seg, f.ctx(0.0, 4.0)), UnservableSegment);
}

TEST_CASE("tie breaking is deterministic") {
  Fixture f;
  const Segment seg = tiny_segment(GaussianModel(1.0, 0.0));
  // two neighbor sources with identical degenerate models
  f.sc.nodes.push_back({"f2", NodeKind::fdn, 0});
  f.sc.links[1] = pure_latency_link("f1", "f0", 1.0, 0.0);
  f.sc.links.push_back(pure_latency_link("f2", "f0", 1.0, 0.0));
  f.sc.links[0] = pure_latency_link("f0", "v", 0.0, 0.0);
  f.cache.insert("f1", seg.video_id, seg.index);
  f.cache.insert("f2", seg.video_id, seg.index);
  f.sc.nodes[1].worker_count = 0;  // no on-demand candidate

  const auto choice = decide_robust(seg, f.ctx(0.0, 5.0));
  CHECK(choice.kind == DeliveryChoice::Kind::RemoteFetch);
  CHECK(choice.source == "f1");  // smaller source id wins the tie

  // on-demand at the same mean is preferred over any remote fetch
  f.sc.nodes[1].worker_count = 3;
  const auto od = decide_robust(seg, f.ctx(0.0, 5.0));
  CHECK(od.kind == DeliveryChoice::Kind::OnDemand);
}

TEST_CASE("decide honors method capabilities") {
  Fixture f;
  const Segment seg = tiny_segment(GaussianModel(0.5, 0.1));
  f.cache.insert("f1", seg.video_id, seg.index);  // neighbor-only copy

  // CentralCloud: direct single-hop delivery regardless of cache state
  auto c = decide(MethodKind::CentralCloud, seg, f.ctx(0.0, 100.0));
  CHECK(c.kind == DeliveryChoice::Kind::RemoteFetch);
  CHECK(c.source == "cloud");
  CHECK(c.direct);

  // IsolatedFDN never names a neighbor
  c = decide(MethodKind::IsolatedFDN, seg, f.ctx(0.0, 100.0));
  CHECK(c.source != "f1");

  // FederatedCDN cannot process on demand; with empty caches everything
  // comes from the cloud
  CachePlan none;
  DecisionContext ctx = f.ctx(0.0, 100.0);
  ctx.cache = &none;
  c = decide(MethodKind::FederatedCDN, seg, ctx);
  CHECK(c.kind == DeliveryChoice::Kind::RemoteFetch);
  CHECK(c.source == "cloud");
  CHECK_FALSE(c.direct);

  // CDN: local hit when the edge holds the video, else cloud store-and-forward
  CachePlan whole;
  whole.insert("f0", seg.video_id, seg.index);
  ctx.cache = &whole;
  CHECK(decide(MethodKind::CDN, seg, ctx).kind ==
        DeliveryChoice::Kind::LocalCache);
  ctx.cache = &none;
  c = decide(MethodKind::CDN, seg, ctx);
  CHECK(c.kind == DeliveryChoice::Kind::RemoteFetch);
  CHECK(c.source == "cloud");
}

TEST_CASE("argmax contract and cache monotonicity") {
  Fixture f;
  f.sc.nodes.push_back({"f2", NodeKind::fdn, 0});
  f.sc.links.push_back(pure_latency_link("f2", "f0", 0.8, 0.3));
  f.sc.links[0] = pure_latency_link("f0", "v", 0.2, 0.05);
  f.sc.links[1] = pure_latency_link("f1", "f0", 1.2, 0.4);

  SeededRng rng(5);
  for (int i = 0; i < 1000; ++i) {
    Segment seg = tiny_segment(GaussianModel(rng.uniform(0.1, 3.0),
                                             rng.uniform(0.0, 1.0)));
    seg.size_bits = rng.uniform(1e6, 1e8);
    CachePlan cache;
    if (rng.uniform01() < 0.5) cache.insert("f1", seg.video_id, seg.index);
    if (rng.uniform01() < 0.5) cache.insert("f2", seg.video_id, seg.index);
    DecisionContext ctx = f.ctx(0.0, rng.uniform(0.5, 8.0));
    ctx.cache = &cache;

    const auto choice = decide_robust(seg, ctx);
    const auto all = enumerate_choices(seg, ctx, true, true);
    double chosen_rob = -1;
    for (const auto& est : all) {
      if (est.choice.kind == choice.kind && est.choice.source == choice.source) {
        chosen_rob = est.robustness;
      }
    }
    REQUIRE(chosen_rob >= 0);
    for (const auto& est : all) {
      CHECK(chosen_rob >= est.robustness);
    }

    // adding a copy to another neighbor can only improve the chosen
    // robustness (max over a superset)
    CachePlan bigger = cache;
    bigger.insert("f1", seg.video_id, seg.index);
    DecisionContext ctx2 = ctx;
    ctx2.cache = &bigger;
    const auto choice2 = decide_robust(seg, ctx2);
    double rob2 = -1;
    for (const auto& est : enumerate_choices(seg, ctx2, true, true)) {
      if (est.choice.kind == choice2.kind &&
          est.choice.source == choice2.source) {
        rob2 = est.robustness;
      }
    }
    CHECK(rob2 >= chosen_rob);
  }
}

TEST_CASE("unit invariance of decisions") {
  Fixture base;
  base.sc.links[0] = pure_latency_link("f0", "v", 0.2, 0.05);
  SeededRng rng(13);
  for (int i = 0; i < 200; ++i) {
    Fixture f = base;
    const double scale = rng.uniform(0.1, 25.0);
    Segment seg = tiny_segment(GaussianModel(rng.uniform(0.2, 3.0),
                                             rng.uniform(0.0, 0.8)));
    f.cache.insert("f1", seg.video_id, seg.index);
    const double slack = rng.uniform(0.5, 6.0);
    const auto before_r = decide_robust(seg, f.ctx(0.0, slack));
    const auto before_d = decide_deterministic(seg, f.ctx(0.0, slack));

    Fixture scaled = f;
    scaled.cache.insert("f1", seg.video_id, seg.index);
    for (auto& l : scaled.sc.links) {
      l.propagation_model = GaussianModel(l.propagation_model.mean * scale,
                                          l.propagation_model.stddev * scale);
    }
    Segment seg2 = seg;
    seg2.processing_model =
        GaussianModel(seg.processing_model.mean * scale,
                      seg.processing_model.stddev * scale);
    const auto after_r = decide_robust(seg2, scaled.ctx(0.0, slack * scale));
    const auto after_d =
        decide_deterministic(seg2, scaled.ctx(0.0, slack * scale));
    CHECK(before_r.kind == after_r.kind);
    CHECK(before_r.source == after_r.source);
    CHECK(before_d.kind == after_d.kind);
    CHECK(before_d.source == after_d.source);
  }
}

TEST_CASE("degenerate models align robust and deterministic") {
  Fixture f;
  f.sc.links[0] = pure_latency_link("f0", "v", 0.5, 0.0);
  f.sc.links[1] = pure_latency_link("f1", "f0", 1.5, 0.0);
  f.sc.links[2] = pure_latency_link("cloud", "f0", 4.0, 0.0);
  SeededRng rng(23);
  for (int i = 0; i < 200; ++i) {
    Segment seg = tiny_segment(GaussianModel(rng.uniform(0.2, 4.0), 0.0));
    CachePlan cache;
    if (rng.uniform01() < 0.5) cache.insert("f1", seg.video_id, seg.index);
    DecisionContext ctx = f.ctx(0.0, rng.uniform(3.0, 10.0));
    ctx.cache = &cache;
    const auto r = decide_robust(seg, ctx);
    const auto d = decide_deterministic(seg, ctx);
    CHECK(r.kind == d.kind);
    CHECK(r.source == d.source);
  }
}
