#pragma once

#include <cstdint>

#include "siggame/rng.hpp"

namespace siggame {

enum class SourceKind { Uniform, Gaussian, Exponential };

// Scalar source law. Immutable after construction, safe to share across
// threads. Unbounded supports use IEEE +/-infinity endpoints; every interval
// query accepts infinite endpoints and clips to the support.
class SourceModel {
 public:
  static SourceModel uniform(double lo, double hi);
  static SourceModel gaussian(double mean, double variance);
  static SourceModel exponential(double rate);

  SourceKind kind() const { return kind_; }
  double support_lo() const;
  double support_hi() const;

  double mean() const;
  double variance() const;
  double second_moment() const;

  double pdf(double x) const;
  double cdf(double x) const;

  // P(lo <= m <= hi). Throws InvalidIntervalError when lo > hi.
  double interval_mass(double lo, double hi) const;

  // E[m | lo <= m <= hi]. Throws EmptyBinError on zero-mass intervals.
  double interval_mean(double lo, double hi) const;

  // E[m^2 | lo <= m <= hi]. Throws EmptyBinError on zero-mass intervals.
  double interval_second_moment(double lo, double hi) const;

 private:
  SourceModel(SourceKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  SourceKind kind_;
  double a_;  // uniform: lo, gaussian: mean, exponential: rate
  double b_;  // uniform: hi, gaussian: variance, exponential: unused
};

// One i.i.d. draw from the model.
double sample(const SourceModel& src, RandomStream& stream);

// Counter-addressed draw, for sharded Monte Carlo. `mirror` requests the
// antithetic partner (reflected uniform / negated normal).
double sample_at(const SourceModel& src, const CounterRng& rng,
                 std::uint64_t stream, std::uint64_t counter,
                 bool mirror = false);

}  // namespace siggame
