#pragma once

#include <cstdint>

namespace siggame {

// Counter-based random source: every variate is a pure function of
// (seed, stream, counter). Parallel shards that partition the counter
// range reproduce the serial stream bit for bit, which is what the
// deviation-certification machinery relies on (common random numbers).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Raw 64-bit word at (stream, counter).
  std::uint64_t word(std::uint64_t stream, std::uint64_t counter) const;

  // Uniform on the open interval (0, 1).
  double uniform01(std::uint64_t stream, std::uint64_t counter) const;

  // Standard normal via Box-Muller; one variate per counter.
  double normal(std::uint64_t stream, std::uint64_t counter) const;

 private:
  std::uint64_t word(std::uint64_t stream, std::uint64_t counter,
                     std::uint64_t slot) const;

  std::uint64_t seed_;
};

// Sequential adapter over CounterRng. Single-owner: not meant to be shared
// across threads; parallel code should use CounterRng with explicit counters.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : rng_(seed), stream_(stream) {}

  double uniform01() { return rng_.uniform01(stream_, counter_++); }
  double normal() { return rng_.normal(stream_, counter_++); }
  std::uint64_t next_word() { return rng_.word(stream_, counter_++); }

  const CounterRng& base() const { return rng_; }

 private:
  CounterRng rng_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace siggame
