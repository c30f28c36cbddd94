#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "siggame/signaling_multi.hpp"
#include "siggame/signaling_scalar.hpp"

namespace siggame {

struct SimConfig {
  std::int64_t n_samples = 100000;
  std::uint64_t seed = 0;
  bool antithetic = false;
};

struct CostEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;

  bool within(double reference, double k_sigma = 3.0) const {
    return std::abs(mean - reference) <= k_sigma * std_error;
  }
};

struct SimResult {
  CostEstimate encoder;
  CostEstimate decoder;
  CostEstimate total;  // per-sample encoder + decoder cost, own std error
};

// Simulates m ~ N(0, E[m^2]), w ~ N(0, E[w^2]), x = enc(m), y = x + w,
// u = dec(y) and averages the encoder cost (m-u-b)^2 + lambda x^2 and the
// decoder cost (m-u)^2. Estimates are a pure function of (spec, cfg):
// identical seeds give bit-identical results. Non-finite policy outputs
// raise SimulationAbortError naming the offending input.
SimResult estimate_costs(const std::function<double(double)>& encoder,
                         const std::function<double(double)>& decoder,
                         const ScalarGameSpec& spec, const SimConfig& cfg);

SimResult estimate_costs(const AffinePairScalar& pair,
                         const ScalarGameSpec& spec, const SimConfig& cfg);

// Multi-dimensional variant with m ~ N(0, Sm), w ~ N(0, Sw).
SimResult estimate_costs(const AffinePairMatrix& pair,
                         const MatrixGameSpec& spec, const SimConfig& cfg);

struct DeviationEntry {
  std::string coefficient;
  double step = 0.0;
  double mean_delta = 0.0;  // perturbed own-cost minus base own-cost
  double std_error = 0.0;
  double margin = 0.0;      // mean_delta / std_error
};

struct DeviationCertificate {
  bool pass = false;
  double worst_margin = 0.0;
  std::vector<DeviationEntry> entries;
};

// Unilateral-deviation check under common random numbers: each policy
// coefficient is perturbed by each step and the perturbed own cost must not
// undercut the base cost by more than 3 standard errors of the paired
// difference. Steps must be symmetric around zero; certification requires
// n_samples >= 10^4.
DeviationCertificate deviation_certify(const AffinePairScalar& pair,
                                       const ScalarGameSpec& spec,
                                       const SimConfig& cfg,
                                       const std::vector<double>& steps);

DeviationCertificate deviation_certify(const AffinePairMatrix& pair,
                                       const MatrixGameSpec& spec,
                                       const SimConfig& cfg,
                                       const std::vector<double>& steps);

}  // namespace siggame
