#pragma once

#include <cstdint>

namespace ffdn {

// Normal duration model N(mean, stddev), in seconds.
// stddev == 0 denotes a deterministic duration.
struct GaussianModel {
  double mean = 0.0;
  double stddev = 0.0;

  GaussianModel() = default;
  GaussianModel(double mean_s, double stddev_s);

  bool degenerate() const { return stddev == 0.0; }
};

// Sum of two independent normal durations, in closed form.
GaussianModel convolve(const GaussianModel& a, const GaussianModel& b);

// P(X <= t) for X ~ g. Degenerate models yield a step function:
// 0 for t < mean, 1 otherwise.
double cdf_at(const GaussianModel& g, double t);

// Deterministic 64-bit generator (splitmix64 sequence). Identical seeds
// give identical streams on every platform; no libstdc++ distributions
// are involved anywhere in the sampling path.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform01();                            // [0, 1)
  double uniform(double lo, double hi);          // [lo, hi)
  std::uint64_t uniform_index(std::uint64_t n);  // [0, n), n > 0
  double normal(const GaussianModel& g);         // unbounded draw

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

// One draw from g that is >= floor: rejection sampling capped at 64
// attempts, then clamped to floor.
double sample_truncated(const GaussianModel& g, SeededRng& rng, double floor);

// Child-seed derivation for reproducible, embarrassingly parallel runs:
//   derive_seed(base, a, b) = mix64(base + C1*(a+1) + C2*(b+1))
// where mix64 is the splitmix64 finalizer and C1, C2 are fixed odd
// 64-bit constants.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b = 0);

}  // namespace ffdn
