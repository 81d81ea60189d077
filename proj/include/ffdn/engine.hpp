#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ffdn/model.hpp"
#include "ffdn/policies.hpp"
#include "ffdn/scenario.hpp"

namespace ffdn {

// Fluid fair-share bandwidth on one directed link: every active transfer
// drains at capacity / n, recomputed whenever a transfer starts or
// completes.
class FluidLink {
 public:
  explicit FluidLink(double capacity_bps);

  // Registers a transfer and returns its id. Drains elapsed progress of
  // the other transfers first.
  int add_transfer(double now, double bits);

  // Earliest completion time under the current shares; empty when idle.
  std::optional<double> next_completion_time() const;

  // Drains progress up to `now` and removes every transfer that has
  // finished; returns their ids in ascending order.
  std::vector<int> collect_completed(double now);

  int active_count() const { return static_cast<int>(remaining_.size()); }
  double remaining_bits(int id) const;
  std::uint64_t epoch() const { return epoch_; }

 private:
  void drain(double now);

  double capacity_;
  double last_update_ = 0.0;
  std::uint64_t epoch_ = 0;
  int next_id_ = 0;
  std::map<int, double> remaining_;
};

// Non-preemptive earliest-deadline-first worker pool.
class WorkerPool {
 public:
  explicit WorkerPool(int worker_count);

  // Enqueues a job; returns true when a worker is free and the job
  // starts immediately.
  bool submit(std::uint64_t job_id, double deadline);

  // Releases a worker; returns the id of the next job to start (EDF
  // order), if any.
  std::optional<std::uint64_t> release();

  int busy() const { return busy_; }
  int worker_count() const { return worker_count_; }
  std::size_t queued() const { return queue_.size(); }

 private:
  int worker_count_;
  int busy_ = 0;
  std::uint64_t submit_seq_ = 0;
  // (deadline, submission order) -> job id
  std::map<std::pair<double, std::uint64_t>, std::uint64_t> queue_;
};

struct SegmentOutcome {
  std::string request_id;
  std::string video_id;
  int segment_index = 0;
  DeliveryChoice choice;
  double delivered_at = 0.0;
  double deadline = 0.0;
  bool missed = false;
};

struct RunSummary {
  MethodKind method = MethodKind::RobustFFDN;
  long total_segments = 0;
  long missed_segments = 0;
  double miss_rate = 0.0;
  long local_cache = 0;
  long on_demand = 0;
  long remote_fdn = 0;
  long remote_cloud = 0;
  std::uint64_t seed = 0;
};

struct RunResult {
  std::vector<SegmentOutcome> outcomes;  // ordered by (request, segment)
  RunSummary summary;
};

struct RunOptions {
  bool queue_aware = false;
  bool just_in_time = false;
  std::string event_log_path;  // empty: no event log
};

// Executes one full trace under one delivery method. Strictly
// single-threaded and deterministic per (scenario, trace, method, seed).
RunResult run(const Scenario& scenario, const std::vector<VideoAsset>& catalog,
              const CachePlan& cache, const WorkloadTrace& trace,
              MethodKind method, std::uint64_t seed,
              const RunOptions& options = {});

}  // namespace ffdn
