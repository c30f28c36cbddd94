#include "siggame/rng.hpp"

#include <cmath>
#include <numbers>

namespace siggame {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSlotSalt = 0x6A09E667F3BCC909ULL;

// splitmix64 output function.
std::uint64_t finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double to_unit_interval(std::uint64_t w) {
  // 53-bit mantissa, offset by half an ulp so 0 and 1 are excluded.
  return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::uint64_t CounterRng::word(std::uint64_t stream, std::uint64_t counter) const {
  return word(stream, counter, 0);
}

std::uint64_t CounterRng::word(std::uint64_t stream, std::uint64_t counter,
                               std::uint64_t slot) const {
  // Per-stream base state, then walk the splitmix64 sequence by counter.
  // Slots keep differently-shaped variates at the same counter independent
  // (a normal consumes two words, a uniform one).
  std::uint64_t base = finalize(seed_ + kGolden * (stream + 1));
  return finalize(base + kGolden * counter + kSlotSalt * slot);
}

double CounterRng::uniform01(std::uint64_t stream, std::uint64_t counter) const {
  return to_unit_interval(word(stream, counter, 0));
}

double CounterRng::normal(std::uint64_t stream, std::uint64_t counter) const {
  double u1 = to_unit_interval(word(stream, counter, 1));
  double u2 = to_unit_interval(word(stream, counter, 2));
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace siggame
