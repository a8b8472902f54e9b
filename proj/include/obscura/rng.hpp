#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Deterministic per-trial randomness.
//
// Every trial owns a private stream seeded from (master_seed, trial_index)
// through a counter-based SplitMix64 derivation, so results depend only on
// the master seed and the trial index — never on scheduling or degree of
// parallelism. Sampling uses the raw 64-bit engine output and inverse-CDF
// transforms only (no std::*_distribution), so a given build reproduces the
// same draws bit for bit.

namespace obscura {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream seed for trial i under a master seed: both inputs are mixed so
// nearby indices and nearby master seeds yield decorrelated streams.
constexpr std::uint64_t stream_seed(std::uint64_t master_seed,
                                    std::uint64_t trial_index) {
  return splitmix64(splitmix64(master_seed) ^
                    splitmix64(trial_index + 0xD1B54A32D192ED03ULL));
}

class TrialRng {
 public:
  explicit TrialRng(std::uint64_t seed) : engine_(seed) {}

  TrialRng(std::uint64_t master_seed, std::uint64_t trial_index)
      : engine_(stream_seed(master_seed, trial_index)) {}

  // Uniform double in [0, 1), 53 usable bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Exponential by inversion; rate in events/hour, result in hours.
  double exponential(double rate_per_hour) {
    return -std::log1p(-uniform01()) / rate_per_hour;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace obscura
