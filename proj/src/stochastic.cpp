#include "ffdn/stochastic.hpp"

#include <cmath>
#include <stdexcept>

namespace ffdn {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace

GaussianModel::GaussianModel(double mean_s, double stddev_s)
    : mean(mean_s), stddev(stddev_s) {
  if (!std::isfinite(mean_s) || !std::isfinite(stddev_s)) {
    throw std::invalid_argument("GaussianModel: parameters must be finite");
  }
  if (stddev_s < 0.0) {
    throw std::invalid_argument("GaussianModel: stddev must be >= 0");
  }
}

GaussianModel convolve(const GaussianModel& a, const GaussianModel& b) {
  return GaussianModel(a.mean + b.mean, std::hypot(a.stddev, b.stddev));
}

double cdf_at(const GaussianModel& g, double t) {
  if (!std::isfinite(t)) {
    return t > 0 ? 1.0 : 0.0;
  }
  if (g.degenerate()) {
    return t < g.mean ? 0.0 : 1.0;
  }
  // std::erfc is accurate to well under 1e-7 absolute over the whole range.
  const double z = (t - g.mean) / g.stddev;
  return 0.5 * std::erfc(-z * kInvSqrt2);
}

SeededRng::SeededRng(std::uint64_t seed)
    : seed_(seed), state_(mix64(seed ^ 0x9e3779b97f4a7c15ULL)) {}

std::uint64_t SeededRng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

double SeededRng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

std::uint64_t SeededRng::uniform_index(std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("uniform_index: n must be > 0");
  }
  return next_u64() % n;
}

double SeededRng::normal(const GaussianModel& g) {
  if (g.degenerate()) {
    next_u64();  // keep stream position independent of parameters
    next_u64();
    return g.mean;
  }
  // Box-Muller, cosine branch only. Two uniforms per draw keeps the
  // stream position deterministic (no cached spare).
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double z = r * std::cos(2.0 * M_PI * u2);
  return g.mean + g.stddev * z;
}

double sample_truncated(const GaussianModel& g, SeededRng& rng, double floor) {
  if (g.degenerate()) {
    const double v = g.mean;
    rng.next_u64();
    rng.next_u64();
    return v < floor ? floor : v;
  }
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double v = rng.normal(g);
    if (v >= floor) {
      return v;
    }
  }
  return floor;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b) {
  return mix64(base + 0x9e3779b97f4a7c15ULL * (a + 1) +
               0x2545f4914f6cdd1dULL * (b + 1));
}

}  // namespace ffdn
