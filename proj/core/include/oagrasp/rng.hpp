#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace oagrasp {

// Deterministic random source. Distributions are hand-rolled on top of
// mt19937_64 so that streams do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  // Uniform integer in [lo, hi], bounds inclusive.
  int uniform_int(int lo, int hi);

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal, Box-Muller with a cached spare.
  double normal();

  // Seed for an independent child stream.
  std::uint64_t fork_seed() { return next_u64() ^ 0x9e3779b97f4a7c15ull; }

  // m distinct values from [0, n), in draw order (partial Fisher-Yates).
  std::vector<int> sample_without_replacement(int n, int m);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace oagrasp
