#pragma once

#include <optional>
#include <string>
#include <vector>

#include "siggame/report.hpp"
#include "siggame/source_model.hpp"

namespace siggame {

// Noiseless scalar cheap talk: encoder cost (m-u-b)^2, decoder cost (m-u)^2.
struct CheapTalkSpec {
  SourceModel source;
  double bias = 0.0;
};

// Quantized encoder policy: N bins separated by N-1 interior boundaries,
// decoder action per bin. In equilibrium each action is the conditional
// mean of its bin and adjacent actions are more than 2|bias| apart.
struct QuantizerPolicy {
  std::vector<double> boundaries;  // strictly increasing, interior edges
  std::vector<double> actions;     // strictly increasing, one per bin

  int bins() const { return static_cast<int>(actions.size()); }

  // Throws ValidationError on unsorted/mismatched data.
  void validate() const;

  // Bin edges of bin i as [lo, hi], including the (possibly infinite)
  // support endpoints.
  std::pair<double, double> bin(int i, const SourceModel& src) const;
};

// Source value at which the encoder is indifferent between two adjacent
// actions. Throws ValidationError unless u_low < u_high.
double boundary_condition(double u_low, double u_high, double bias);

// Shooting solver for the N-bin equilibrium. Returns nullopt when no N-bin
// equilibrium exists for this bias (residual never changes sign on the
// scan); throws SolverFailureError if bisection fails to converge.
std::optional<QuantizerPolicy> solve_quantizer_equilibrium(
    const CheapTalkSpec& spec, int n_bins);

// All equilibria found on a scan of the shooting parameter (distinct roots
// of the closure residual). Empty when infeasible.
std::vector<QuantizerPolicy> enumerate_quantizer_equilibria(
    const CheapTalkSpec& spec, int n_bins, int scan_points = 10000);

// Largest N <= cap admitting an N-bin equilibrium (>= 1 always; the
// single-bin babbling equilibrium always exists).
int max_bins(const CheapTalkSpec& spec, int cap);

struct VerificationResult {
  bool pass = false;
  double decoder_deviation = 0.0;  // max |action - bin conditional mean|
  double encoder_slack = 0.0;      // min over grid of (best cost - assigned cost)
  std::string failure;
};

// Checks decoder best response (actions are bin means within 1e-8) and
// encoder best response on a grid of >= `grid` points spanning the support
// (assigned action optimal within slack -1e-10).
VerificationResult verify_equilibrium(const CheapTalkSpec& spec,
                                      const QuantizerPolicy& policy,
                                      int grid);

struct CheapTalkCosts {
  double encoder = 0.0;
  double decoder = 0.0;
};

CheapTalkCosts costs(const CheapTalkSpec& spec, const QuantizerPolicy& policy);

// Stackelberg cheap talk: the encoder commits first and full revelation is
// optimal, so J_d = 0 and J_e = bias^2.
EquilibriumReport stackelberg_cheap_talk(const CheapTalkSpec& spec);

// Scan interval for boundaries/grids on possibly unbounded supports.
std::pair<double, double> scan_range(const SourceModel& src);

}  // namespace siggame
