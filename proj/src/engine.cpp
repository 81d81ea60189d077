#include "ffdn/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>

namespace ffdn {

namespace {
constexpr double kBitsEpsilon = 1e-6;
}

FluidLink::FluidLink(double capacity_bps) : capacity_(capacity_bps) {
  if (capacity_bps <= 0.0) {
    throw std::invalid_argument("FluidLink: capacity must be positive");
  }
}

void FluidLink::drain(double now) {
  if (!remaining_.empty() && now > last_update_) {
    const double rate = capacity_ / static_cast<double>(remaining_.size());
    const double drained = rate * (now - last_update_);
    for (auto& [id, bits] : remaining_) {
      bits = std::max(0.0, bits - drained);
    }
  }
  last_update_ = now;
}

int FluidLink::add_transfer(double now, double bits) {
  drain(now);
  const int id = next_id_++;
  remaining_[id] = std::max(bits, 0.0);
  ++epoch_;
  return id;
}

std::optional<double> FluidLink::next_completion_time() const {
  if (remaining_.empty()) {
    return std::nullopt;
  }
  double min_bits = remaining_.begin()->second;
  for (const auto& [id, bits] : remaining_) {
    min_bits = std::min(min_bits, bits);
  }
  const double rate = capacity_ / static_cast<double>(remaining_.size());
  return last_update_ + min_bits / rate;
}

std::vector<int> FluidLink::collect_completed(double now) {
  drain(now);
  // A residual too small to drain within one representable time step
  // would stall the clock; treat it as complete.
  double eps = kBitsEpsilon;
  if (!remaining_.empty()) {
    const double rate = capacity_ / static_cast<double>(remaining_.size());
    const double tick =
        std::nextafter(std::abs(now), std::numeric_limits<double>::infinity()) -
        std::abs(now);
    eps = std::max(eps, 4.0 * rate * tick);
  }
  std::vector<int> done;
  for (auto it = remaining_.begin(); it != remaining_.end();) {
    if (it->second <= eps) {
      done.push_back(it->first);
      it = remaining_.erase(it);
    } else {
      ++it;
    }
  }
  if (!done.empty()) {
    ++epoch_;
  }
  return done;
}

double FluidLink::remaining_bits(int id) const {
  auto it = remaining_.find(id);
  return it == remaining_.end() ? 0.0 : it->second;
}

WorkerPool::WorkerPool(int worker_count) : worker_count_(worker_count) {
  if (worker_count < 0) {
    throw std::invalid_argument("WorkerPool: negative worker count");
  }
}

bool WorkerPool::submit(std::uint64_t job_id, double deadline) {
  if (busy_ < worker_count_) {
    ++busy_;
    return true;
  }
  queue_.emplace(std::make_pair(deadline, submit_seq_++), job_id);
  return false;
}

std::optional<std::uint64_t> WorkerPool::release() {
  if (busy_ <= 0) {
    throw std::logic_error("WorkerPool::release with no busy worker");
  }
  if (queue_.empty()) {
    --busy_;
    return std::nullopt;
  }
  auto it = queue_.begin();
  const std::uint64_t job = it->second;
  queue_.erase(it);
  return job;  // worker stays busy with the next job
}

namespace {

enum class EvKind {
  Arrival,      // a: request index
  Decide,       // a: pending decision index
  LinkCheck,    // a: link index, b: epoch at scheduling time
  ProcDone,     // a: fdn index, b: job id
  HopArrive,    // a: transfer id
};

struct Ev {
  double t;
  std::uint64_t seq;
  EvKind kind;
  std::uint64_t a;
  std::uint64_t b;
};

struct EvLater {
  bool operator()(const Ev& x, const Ev& y) const {
    if (x.t != y.t) return x.t > y.t;
    return x.seq > y.seq;
  }
};

struct TransferRec {
  std::size_t link_idx = 0;
  int fluid_id = -1;
  double latency_offset = 0.0;
  std::size_t req_idx = 0;
  int seg_idx = 0;
  bool final_hop = true;  // destination is the viewer
};

struct JobRec {
  std::size_t req_idx = 0;
  int seg_idx = 0;
  double deadline = 0.0;
};

struct PendingDecision {
  std::size_t req_idx = 0;
  int seg_idx = 0;
};

class Simulation {
 public:
  Simulation(const Scenario& scenario, const std::vector<VideoAsset>& catalog,
             const CachePlan& cache, const WorkloadTrace& trace,
             MethodKind method, std::uint64_t seed, const RunOptions& options)
      : scenario_(scenario),
        cache_(cache),
        trace_(trace),
        method_(method),
        options_(options),
        rng_(seed),
        cloud_id_(scenario.cloud_id()) {
    for (const auto& v : catalog) {
      videos_[v.id] = &v;
    }
    for (const auto& l : scenario.links) {
      links_.emplace_back(l.capacity_bps);
    }
    for (const auto& n : scenario.nodes) {
      if (n.kind == NodeKind::fdn) {
        pool_index_[n.id] = pools_.size();
        pools_.emplace_back(n.worker_count);
      }
    }
    if (!options.event_log_path.empty()) {
      log_.open(options.event_log_path);
      if (!log_) {
        throw std::runtime_error("cannot open event log " +
                                 options.event_log_path);
      }
    }
  }

  RunResult execute(std::uint64_t seed) {
    for (std::size_t r = 0; r < trace_.requests.size(); ++r) {
      push(trace_.requests[r].arrival_time, EvKind::Arrival, r, 0);
    }
    while (!events_.empty()) {
      const Ev ev = events_.top();
      events_.pop();
      now_ = ev.t;
      dispatch_event(ev);
    }

    RunResult result;
    result.summary.method = method_;
    result.summary.seed = seed;
    for (auto& [key, outcome] : outcomes_) {
      result.summary.total_segments++;
      if (outcome.missed) {
        result.summary.missed_segments++;
      }
      switch (outcome.choice.kind) {
        case DeliveryChoice::Kind::LocalCache:
          result.summary.local_cache++;
          break;
        case DeliveryChoice::Kind::OnDemand:
          result.summary.on_demand++;
          break;
        case DeliveryChoice::Kind::RemoteFetch:
          if (outcome.choice.source == cloud_id_) {
            result.summary.remote_cloud++;
          } else {
            result.summary.remote_fdn++;
          }
          break;
      }
      result.outcomes.push_back(std::move(outcome));
    }
    result.summary.miss_rate =
        result.summary.total_segments == 0
            ? 0.0
            : static_cast<double>(result.summary.missed_segments) /
                  static_cast<double>(result.summary.total_segments);
    if (result.summary.total_segments != trace_.total_segments) {
      throw std::logic_error("engine: outcome count mismatch");
    }
    return result;
  }

 private:
  void push(double t, EvKind kind, std::uint64_t a, std::uint64_t b) {
    events_.push(Ev{t, seq_++, kind, a, b});
  }

  void log_event(const char* kind, const std::string& req, int seg,
                 const std::string& node) {
    if (!log_.is_open()) {
      return;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", now_);
    log_ << "t=" << buf << " kind=" << kind << " req=" << req
         << " seg=" << seg << " node=" << node << '\n';
  }

  const VideoAsset& video_of(const StreamRequest& req) const {
    auto it = videos_.find(req.video_id);
    if (it == videos_.end()) {
      throw ConfigError("trace references unknown video " + req.video_id);
    }
    return *it->second;
  }

  std::size_t link_index(const std::string& from, const std::string& to) {
    for (std::size_t i = 0; i < scenario_.links.size(); ++i) {
      if (scenario_.links[i].from == from && scenario_.links[i].to == to) {
        return i;
      }
    }
    throw ConfigError("missing link " + from + " -> " + to);
  }

  void dispatch_event(const Ev& ev) {
    switch (ev.kind) {
      case EvKind::Arrival:
        on_arrival(static_cast<std::size_t>(ev.a));
        break;
      case EvKind::Decide: {
        const PendingDecision pd = pending_[static_cast<std::size_t>(ev.a)];
        decide_and_dispatch(pd.req_idx, pd.seg_idx);
        break;
      }
      case EvKind::LinkCheck:
        on_link_check(static_cast<std::size_t>(ev.a), ev.b);
        break;
      case EvKind::ProcDone:
        on_proc_done(static_cast<std::size_t>(ev.a), ev.b);
        break;
      case EvKind::HopArrive:
        on_hop_arrive(static_cast<std::uint64_t>(ev.a));
        break;
    }
  }

  void on_arrival(std::size_t req_idx) {
    const StreamRequest& req = trace_.requests[req_idx];
    const VideoAsset& video = video_of(req);
    const auto deadlines = assign_deadlines(req, video);
    deadlines_[req_idx] = deadlines;
    log_event("request_arrival", req.id, -1, req.local_fdn);
    for (std::size_t i = 0; i < deadlines.size(); ++i) {
      if (options_.just_in_time) {
        const double gop = video.segments[i].gop_duration;
        const double when = std::max(req.arrival_time, deadlines[i] - gop);
        pending_.push_back({req_idx, static_cast<int>(i)});
        push(when, EvKind::Decide, pending_.size() - 1, 0);
      } else {
        decide_and_dispatch(req_idx, static_cast<int>(i));
      }
    }
  }

  double backlog_estimate(const std::string& fdn) {
    auto it = pool_index_.find(fdn);
    if (it == pool_index_.end()) {
      return 0.0;
    }
    const WorkerPool& pool = pools_[it->second];
    if (pool.worker_count() == 0) {
      return 0.0;
    }
    return backlog_work_[it->second] /
           static_cast<double>(pool.worker_count());
  }

  void decide_and_dispatch(std::size_t req_idx, int seg_idx) {
    const StreamRequest& req = trace_.requests[req_idx];
    const VideoAsset& video = video_of(req);
    const Segment& seg = video.segments[static_cast<std::size_t>(seg_idx)];
    const double deadline =
        deadlines_[req_idx][static_cast<std::size_t>(seg_idx)];

    DecisionContext ctx;
    ctx.scenario = &scenario_;
    ctx.cache = &cache_;
    ctx.local_fdn = req.local_fdn;
    ctx.viewer = req.viewer_id;
    ctx.now = now_;
    ctx.deadline = deadline;
    ctx.queue_aware = options_.queue_aware;
    if (options_.queue_aware) {
      ctx.on_demand_backlog_s = backlog_estimate(req.local_fdn);
    }

    DeliveryChoice choice;
    try {
      choice = decide(method_, seg, ctx);
    } catch (const UnservableSegment&) {
      throw;
    }
    choices_[{req_idx, seg_idx}] = choice;
    log_event("segment_decided", req.id, seg_idx, req.local_fdn);

    switch (choice.kind) {
      case DeliveryChoice::Kind::LocalCache:
        start_transfer(req.local_fdn, req.viewer_id, req_idx, seg_idx, true);
        break;
      case DeliveryChoice::Kind::OnDemand:
        submit_job(req_idx, seg_idx, deadline);
        break;
      case DeliveryChoice::Kind::RemoteFetch:
        if (choice.direct) {
          start_transfer(choice.source, req.viewer_id, req_idx, seg_idx, true);
        } else {
          start_transfer(choice.source, req.local_fdn, req_idx, seg_idx,
                         false);
        }
        break;
    }
  }

  void submit_job(std::size_t req_idx, int seg_idx, double deadline) {
    const StreamRequest& req = trace_.requests[req_idx];
    auto it = pool_index_.find(req.local_fdn);
    if (it == pool_index_.end()) {
      throw ConfigError("on-demand at non-FDN node " + req.local_fdn);
    }
    const std::size_t pool_idx = it->second;
    const std::uint64_t job_id = next_job_id_++;
    jobs_[job_id] = JobRec{req_idx, seg_idx, deadline};
    const Segment& seg = segment_of(req_idx, seg_idx);
    backlog_work_[pool_idx] += seg.processing_model.mean;
    if (pools_[pool_idx].submit(job_id, deadline)) {
      start_processing(pool_idx, job_id);
    }
  }

  const Segment& segment_of(std::size_t req_idx, int seg_idx) const {
    const StreamRequest& req = trace_.requests[req_idx];
    auto it = videos_.find(req.video_id);
    return it->second->segments[static_cast<std::size_t>(seg_idx)];
  }

  void start_processing(std::size_t pool_idx, std::uint64_t job_id) {
    const JobRec& job = jobs_[job_id];
    const Segment& seg = segment_of(job.req_idx, job.seg_idx);
    const double service =
        sample_truncated(seg.processing_model, rng_, 0.0);
    log_event("processing_start", trace_.requests[job.req_idx].id,
              job.seg_idx, trace_.requests[job.req_idx].local_fdn);
    push(now_ + service, EvKind::ProcDone, pool_idx, job_id);
  }

  void on_proc_done(std::size_t pool_idx, std::uint64_t job_id) {
    const JobRec job = jobs_[job_id];
    const StreamRequest& req = trace_.requests[job.req_idx];
    const Segment& seg = segment_of(job.req_idx, job.seg_idx);
    backlog_work_[pool_idx] -= seg.processing_model.mean;
    log_event("processing_complete", req.id, job.seg_idx, req.local_fdn);
    start_transfer(req.local_fdn, req.viewer_id, job.req_idx, job.seg_idx,
                   true);
    if (auto next = pools_[pool_idx].release()) {
      start_processing(pool_idx, *next);
    }
  }

  void start_transfer(const std::string& from, const std::string& to,
                      std::size_t req_idx, int seg_idx, bool final_hop) {
    const std::size_t li = link_index(from, to);
    const Segment& seg = segment_of(req_idx, seg_idx);
    const double offset = sample_truncated(
        scenario_.links[li].propagation_model, rng_, 0.0);
    const int fid = links_[li].add_transfer(now_, seg.size_bits);
    const std::uint64_t tid = next_transfer_id_++;
    transfers_[tid] =
        TransferRec{li, fid, offset, req_idx, seg_idx, final_hop};
    by_fluid_[{li, fid}] = tid;
    log_event("transfer_start", trace_.requests[req_idx].id, seg_idx, from);
    schedule_link_check(li);
  }

  void schedule_link_check(std::size_t li) {
    if (auto t = links_[li].next_completion_time()) {
      push(std::max(*t, now_), EvKind::LinkCheck, li, links_[li].epoch());
    }
  }

  void on_link_check(std::size_t li, std::uint64_t epoch) {
    if (epoch != links_[li].epoch()) {
      return;  // superseded by a later recompute
    }
    const auto done = links_[li].collect_completed(now_);
    for (int fid : done) {
      const auto key = std::make_pair(li, fid);
      const std::uint64_t tid = by_fluid_.at(key);
      by_fluid_.erase(key);
      const TransferRec& rec = transfers_.at(tid);
      log_event("transfer_complete", trace_.requests[rec.req_idx].id,
                rec.seg_idx, scenario_.links[li].from);
      push(now_ + rec.latency_offset, EvKind::HopArrive, tid, 0);
    }
    schedule_link_check(li);
  }

  void on_hop_arrive(std::uint64_t tid) {
    const TransferRec rec = transfers_.at(tid);
    transfers_.erase(tid);
    const StreamRequest& req = trace_.requests[rec.req_idx];
    if (rec.final_hop) {
      const double deadline =
          deadlines_[rec.req_idx][static_cast<std::size_t>(rec.seg_idx)];
      SegmentOutcome outcome;
      outcome.request_id = req.id;
      outcome.video_id = req.video_id;
      outcome.segment_index = rec.seg_idx;
      outcome.choice = choices_[{rec.req_idx, rec.seg_idx}];
      outcome.delivered_at = now_;
      outcome.deadline = deadline;
      outcome.missed = now_ > deadline;
      outcomes_[{rec.req_idx, rec.seg_idx}] = std::move(outcome);
      log_event("segment_delivered", req.id, rec.seg_idx, req.viewer_id);
    } else {
      // store-and-forward: second hop from the local FDN to the viewer
      log_event("segment_staged", req.id, rec.seg_idx, req.local_fdn);
      start_transfer(req.local_fdn, req.viewer_id, rec.req_idx, rec.seg_idx,
                     true);
    }
  }

  const Scenario& scenario_;
  const CachePlan& cache_;
  const WorkloadTrace& trace_;
  MethodKind method_;
  RunOptions options_;
  SeededRng rng_;
  std::string cloud_id_;

  std::map<std::string, const VideoAsset*> videos_;
  std::vector<FluidLink> links_;
  std::vector<WorkerPool> pools_;
  std::map<std::string, std::size_t> pool_index_;
  std::map<std::size_t, double> backlog_work_;

  std::priority_queue<Ev, std::vector<Ev>, EvLater> events_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;

  std::map<std::size_t, std::vector<double>> deadlines_;
  std::vector<PendingDecision> pending_;
  std::map<std::pair<std::size_t, int>, DeliveryChoice> choices_;
  std::map<std::pair<std::size_t, int>, SegmentOutcome> outcomes_;

  std::uint64_t next_job_id_ = 0;
  std::map<std::uint64_t, JobRec> jobs_;
  std::uint64_t next_transfer_id_ = 0;
  std::map<std::uint64_t, TransferRec> transfers_;
  std::map<std::pair<std::size_t, int>, std::uint64_t> by_fluid_;

  std::ofstream log_;
};

}  // namespace

RunResult run(const Scenario& scenario, const std::vector<VideoAsset>& catalog,
              const CachePlan& cache, const WorkloadTrace& trace,
              MethodKind method, std::uint64_t seed,
              const RunOptions& options) {
  Simulation sim(scenario, catalog, cache, trace, method, seed, options);
  return sim.execute(seed);
}

}  // namespace ffdn
