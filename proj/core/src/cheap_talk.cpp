#include "siggame/cheap_talk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "siggame/errors.hpp"

namespace siggame {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBig = 1e100;           // saturated residual for dead branches
constexpr double kShootTol = 1e-12;      // bisection tolerance on t1
constexpr int kShootCap = 200;           // bisection iteration cap

// Solve mean(a, t) = target for t > a. Returns nullopt when the target mean
// is not attainable inside the support (t would pass the upper edge).
std::optional<double> invert_bin_mean(const SourceModel& src, double a,
                                      double target) {
  double hi = src.support_hi();
  if (src.kind() == SourceKind::Uniform) {
    double t = 2.0 * target - a;
    if (t > hi) return std::nullopt;
    return t;
  }
  // mean(a, t) grows from a to mean(a, hi); bracket then bisect.
  double full = src.interval_mean(a, hi);
  if (!(target < full)) return std::nullopt;
  double scale = std::sqrt(src.variance());
  double ub = a + std::max(scale, 2.0 * (target - a));
  for (int i = 0; i < 200 && src.interval_mean(a, ub) <= target; ++i) {
    ub = a + 2.0 * (ub - a);
  }
  double lb = target;  // mean(a, t) < t, so the root is above `target`
  for (int i = 0; i < 200 && ub - lb > 1e-15 * std::max(1.0, std::abs(ub));
       ++i) {
    double mid = 0.5 * (lb + ub);
    (src.interval_mean(a, mid) < target ? lb : ub) = mid;
  }
  return 0.5 * (lb + ub);
}

struct Shot {
  double residual = 0.0;             // mean(last bin) - propagated last action
  std::vector<double> boundaries;
  std::vector<double> actions;
  bool valid = false;                // full propagation succeeded
};

// Left-to-right propagation from a trial first boundary. Dead branches are
// reported through a saturated residual of the sign the bisection needs:
// +big when the action recursion falls short, -big when it runs past the
// upper support edge.
Shot shoot(const CheapTalkSpec& spec, int n_bins, double t1) {
  const SourceModel& src = spec.source;
  const double lo = src.support_lo();
  const double hi = src.support_hi();

  Shot shot;
  shot.boundaries.reserve(n_bins - 1);
  shot.actions.reserve(n_bins);

  shot.boundaries.push_back(t1);
  shot.actions.push_back(src.interval_mean(lo, t1));

  for (int k = 1; k < n_bins; ++k) {
    double t_k = shot.boundaries.back();
    double u_k = shot.actions.back();
    // Indifference at t_k: t_k = (u_k + u_next)/2 + bias.
    double u_next = 2.0 * (t_k - spec.bias) - u_k;
    if (!(u_next > t_k)) {
      shot.residual = kBig;
      return shot;
    }
    shot.actions.push_back(u_next);
    if (k < n_bins - 1) {
      std::optional<double> t_next = invert_bin_mean(src, t_k, u_next);
      if (!t_next) {
        shot.residual = -kBig;
        return shot;
      }
      shot.boundaries.push_back(*t_next);
    }
  }

  double last_mean = src.interval_mean(shot.boundaries.back(), hi);
  shot.residual = last_mean - shot.actions.back();
  shot.valid = true;
  return shot;
}

// Rebuild a policy from a converged shooting parameter: boundaries from the
// propagation, actions snapped to exact bin conditional means.
std::optional<QuantizerPolicy> policy_from_root(const CheapTalkSpec& spec,
                                                int n_bins, double t1) {
  Shot shot = shoot(spec, n_bins, t1);
  if (!shot.valid) return std::nullopt;

  QuantizerPolicy policy;
  policy.boundaries = shot.boundaries;
  policy.actions.resize(n_bins);
  for (int i = 0; i < n_bins; ++i) {
    auto [a, b] = policy.bin(i, spec.source);
    policy.actions[i] = spec.source.interval_mean(a, b);
  }

  // A root only counts as an equilibrium if the action chain is strictly
  // increasing with the 2|b| separation the indifference conditions imply.
  double min_gap = kInf;
  for (int i = 0; i + 1 < n_bins; ++i) {
    min_gap = std::min(min_gap, policy.actions[i + 1] - policy.actions[i]);
  }
  if (!(min_gap > 2.0 * std::abs(spec.bias))) return std::nullopt;
  for (size_t i = 0; i + 1 < policy.boundaries.size(); ++i) {
    if (!(policy.boundaries[i] < policy.boundaries[i + 1])) return std::nullopt;
  }
  return policy;
}

// Bisect a sign change of the closure residual down to kShootTol.
double bisect_bracket(const CheapTalkSpec& spec, int n_bins, double lo,
                      double hi, double f_lo) {
  for (int i = 0; i < kShootCap; ++i) {
    if (hi - lo <= kShootTol) return 0.5 * (lo + hi);
    double mid = 0.5 * (lo + hi);
    double f_mid = shoot(spec, n_bins, mid).residual;
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0) == (f_lo > 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  throw SolverFailureError("quantizer shooting: bisection cap exhausted");
}

std::vector<double> find_roots(const CheapTalkSpec& spec, int n_bins,
                               int scan_points, bool first_only) {
  auto [lo, hi] = scan_range(spec.source);
  std::vector<double> roots;
  double prev_t = 0.0, prev_f = 0.0;
  bool have_prev = false;
  for (int i = 1; i <= scan_points; ++i) {
    double t = lo + (hi - lo) * i / (scan_points + 1);
    double f = shoot(spec, n_bins, t).residual;
    if (have_prev && ((prev_f > 0) != (f > 0) || f == 0.0)) {
      roots.push_back(bisect_bracket(spec, n_bins, prev_t, t, prev_f));
      if (first_only) return roots;
    }
    prev_t = t;
    prev_f = f;
    have_prev = true;
  }
  return roots;
}

QuantizerPolicy single_bin_policy(const CheapTalkSpec& spec) {
  QuantizerPolicy policy;
  policy.actions = {spec.source.mean()};
  return policy;
}

}  // namespace

std::pair<double, double> scan_range(const SourceModel& src) {
  switch (src.kind()) {
    case SourceKind::Uniform:
      return {src.support_lo(), src.support_hi()};
    case SourceKind::Gaussian: {
      double sigma = std::sqrt(src.variance());
      return {src.mean() - 10.0 * sigma, src.mean() + 10.0 * sigma};
    }
    case SourceKind::Exponential:
      return {0.0, 50.0 * src.mean()};
  }
  return {0.0, 1.0};
}

void QuantizerPolicy::validate() const {
  if (actions.empty())
    throw ValidationError("quantizer policy: no actions");
  if (actions.size() != boundaries.size() + 1)
    throw ValidationError("quantizer policy: need one action per bin");
  for (size_t i = 0; i + 1 < boundaries.size(); ++i) {
    if (!(boundaries[i] < boundaries[i + 1]))
      throw ValidationError("quantizer policy: boundaries not increasing");
  }
  for (size_t i = 0; i + 1 < actions.size(); ++i) {
    if (!(actions[i] < actions[i + 1]))
      throw ValidationError("quantizer policy: actions not increasing");
  }
  for (double t : boundaries) {
    if (!std::isfinite(t))
      throw ValidationError("quantizer policy: non-finite boundary");
  }
  for (double u : actions) {
    if (!std::isfinite(u))
      throw ValidationError("quantizer policy: non-finite action");
  }
}

std::pair<double, double> QuantizerPolicy::bin(int i,
                                               const SourceModel& src) const {
  double lo = (i == 0) ? src.support_lo() : boundaries[i - 1];
  double hi = (i == bins() - 1) ? src.support_hi() : boundaries[i];
  return {lo, hi};
}

double boundary_condition(double u_low, double u_high, double bias) {
  if (!(u_low < u_high))
    throw ValidationError("boundary_condition: requires u_low < u_high");
  return 0.5 * (u_low + u_high) + bias;
}

std::optional<QuantizerPolicy> solve_quantizer_equilibrium(
    const CheapTalkSpec& spec, int n_bins) {
  if (n_bins < 1)
    throw std::invalid_argument("solve_quantizer_equilibrium: n_bins >= 1");
  if (!std::isfinite(spec.bias))
    throw std::invalid_argument("cheap talk spec: bias must be finite");
  if (n_bins == 1) return single_bin_policy(spec);

  for (double root : find_roots(spec, n_bins, 10000, /*first_only=*/false)) {
    if (auto policy = policy_from_root(spec, n_bins, root)) return policy;
  }
  return std::nullopt;
}

std::vector<QuantizerPolicy> enumerate_quantizer_equilibria(
    const CheapTalkSpec& spec, int n_bins, int scan_points) {
  if (n_bins < 1)
    throw std::invalid_argument("enumerate_quantizer_equilibria: n_bins >= 1");
  if (n_bins == 1) return {single_bin_policy(spec)};

  std::vector<QuantizerPolicy> out;
  for (double root :
       find_roots(spec, n_bins, scan_points, /*first_only=*/false)) {
    if (auto policy = policy_from_root(spec, n_bins, root))
      out.push_back(std::move(*policy));
  }
  return out;
}

int max_bins(const CheapTalkSpec& spec, int cap) {
  if (cap < 1) throw std::invalid_argument("max_bins: cap >= 1");
  for (int n = cap; n >= 2; --n) {
    if (solve_quantizer_equilibrium(spec, n)) return n;
  }
  return 1;
}

VerificationResult verify_equilibrium(const CheapTalkSpec& spec,
                                      const QuantizerPolicy& policy,
                                      int grid) {
  if (grid < 1000)
    throw std::invalid_argument("verify_equilibrium: grid >= 1000 required");
  policy.validate();

  VerificationResult result;
  result.encoder_slack = kInf;

  // Decoder best response: actions must be bin conditional means.
  for (int i = 0; i < policy.bins(); ++i) {
    auto [lo, hi] = policy.bin(i, spec.source);
    double dev = std::abs(policy.actions[i] - spec.source.interval_mean(lo, hi));
    result.decoder_deviation = std::max(result.decoder_deviation, dev);
  }
  if (result.decoder_deviation > 1e-8) {
    result.failure = "decoder action deviates from bin conditional mean";
    return result;
  }

  // Encoder best response on a support-spanning grid.
  auto [lo, hi] = scan_range(spec.source);
  for (int g = 0; g < grid; ++g) {
    double m = lo + (hi - lo) * (g + 0.5) / grid;
    auto assigned = std::upper_bound(policy.boundaries.begin(),
                                     policy.boundaries.end(), m) -
                    policy.boundaries.begin();
    auto cost = [&](double u) {
      double d = m - u - spec.bias;
      return d * d;
    };
    double assigned_cost = cost(policy.actions[assigned]);
    double best_cost = kInf;
    for (double u : policy.actions) best_cost = std::min(best_cost, cost(u));
    result.encoder_slack = std::min(result.encoder_slack,
                                    best_cost - assigned_cost);
  }
  if (result.encoder_slack < -1e-10) {
    result.failure = "encoder prefers another bin's action";
    return result;
  }

  result.pass = true;
  return result;
}

CheapTalkCosts costs(const CheapTalkSpec& spec, const QuantizerPolicy& policy) {
  policy.validate();
  CheapTalkCosts out;
  double cross = 0.0;  // sum of mass * (bin mean - action)
  for (int i = 0; i < policy.bins(); ++i) {
    auto [lo, hi] = policy.bin(i, spec.source);
    double mass = spec.source.interval_mass(lo, hi);
    if (!(mass > 0)) continue;
    double m1 = spec.source.interval_mean(lo, hi);
    double m2 = spec.source.interval_second_moment(lo, hi);
    double u = policy.actions[i];
    out.decoder += mass * (m2 - 2.0 * u * m1 + u * u);
    cross += mass * (m1 - u);
  }
  // (m-u-b)^2 = (m-u)^2 - 2b(m-u) + b^2; the cross term vanishes at
  // decoder best response, leaving J_e = J_d + b^2.
  out.encoder = out.decoder - 2.0 * spec.bias * cross + spec.bias * spec.bias;
  return out;
}

EquilibriumReport stackelberg_cheap_talk(const CheapTalkSpec& spec) {
  EquilibriumReport report;
  report.cls = EquilibriumClass::FullyInformative;
  report.policy = AffinePairScalar{1.0, 0.0, 1.0, 0.0};  // x = m, u = y
  report.decoder_cost = 0.0;
  report.encoder_cost = spec.bias * spec.bias;
  report.total_cost = report.encoder_cost + report.decoder_cost;
  return report;
}

}  // namespace siggame
