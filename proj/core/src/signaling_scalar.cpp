#include "siggame/signaling_scalar.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "siggame/errors.hpp"

namespace siggame {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void ScalarGameSpec::validate() const {
  if (!(source_power > 0) || !std::isfinite(source_power))
    throw std::invalid_argument("scalar game spec: E[m^2] > 0 required");
  if (!(noise_power > 0) || !std::isfinite(noise_power))
    throw std::invalid_argument("scalar game spec: E[w^2] > 0 required");
  if (!(lambda >= 0) || !std::isfinite(lambda))
    throw std::invalid_argument("scalar game spec: lambda >= 0 required");
  if (!std::isfinite(bias))
    throw std::invalid_argument("scalar game spec: bias must be finite");
}

double t_map_bound(const ScalarGameSpec& spec) {
  if (!(spec.lambda > 0))
    throw std::domain_error("t_map_bound: lambda > 0 required");
  return std::max(spec.power_ratio(), 1.0) / spec.lambda;
}

double t_map(double a, const ScalarGameSpec& spec) {
  spec.validate();
  if (!(spec.lambda > 0))
    throw std::domain_error("t_map: lambda > 0 required");
  double gamma = spec.noise_power / spec.source_power;
  double f = a / (a * a + gamma);
  return f / (f * f + spec.lambda);
}

FixedPointIteration iterate_t_map(const ScalarGameSpec& spec, double a0,
                                  double damping, double tol, int cap) {
  if (!(damping > 0) || damping > 1)
    throw std::invalid_argument("iterate_t_map: damping in (0, 1] required");
  FixedPointIteration out;
  out.a = a0;
  for (out.iterations = 0; out.iterations < cap; ++out.iterations) {
    double mapped = t_map(out.a, spec);
    out.residual = std::abs(mapped - out.a);
    if (out.residual < tol) {
      out.converged = true;
      return out;
    }
    out.a = (1.0 - damping) * out.a + damping * mapped;
  }
  return out;
}

int count_nonzero_fixed_points(const ScalarGameSpec& spec, int grid_points) {
  double a_max = t_map_bound(spec);
  int crossings = 0;
  double prev = 0.0;
  bool have_prev = false;
  for (int i = 0; i < grid_points; ++i) {
    double a = 1e-6 + (a_max - 1e-6) * i / (grid_points - 1);
    double g = t_map(a, spec) - a;
    if (have_prev && (g > 0) != (prev > 0)) ++crossings;
    prev = g;
    have_prev = true;
  }
  return crossings;
}

AffinePairScalar nash_informative_pair(const ScalarGameSpec& spec, int sign) {
  spec.validate();
  if (!(spec.lambda > 0) || !(spec.lambda < spec.power_ratio()))
    throw std::domain_error(
        "nash_informative_pair: requires 0 < lambda < E[m^2]/E[w^2]");
  double pm = spec.source_power, pw = spec.noise_power, lam = spec.lambda;
  double k = std::sqrt(std::sqrt(lam * pm / pw) - lam);
  double a = 1.0 / (k + lam / k);
  if (sign < 0) {
    a = -a;
    k = -k;
  }
  double c = a * spec.bias / (a * k - 1.0);
  double l = -k * c;
  return AffinePairScalar{a, c, k, l};
}

AffinePairScalar babbling_pair() { return AffinePairScalar{0, 0, 0, 0}; }

ScalarCosts affine_pair_costs(const AffinePairScalar& pair,
                              const ScalarGameSpec& spec) {
  spec.validate();
  // m - u = (1 - KA) m - K w - (KC + L) under u = K(Am + C + w) + L.
  double slope = 1.0 - pair.K * pair.A;
  double offset = pair.K * pair.C + pair.L;
  double err_var = slope * slope * spec.source_power +
                   pair.K * pair.K * spec.noise_power;
  double power = pair.A * pair.A * spec.source_power + pair.C * pair.C;

  ScalarCosts costs;
  costs.decoder = err_var + offset * offset;
  costs.encoder = err_var + (offset + spec.bias) * (offset + spec.bias) +
                  spec.lambda * power;
  costs.total = costs.encoder + costs.decoder;
  return costs;
}

EquilibriumReport solve_affine_nash(const ScalarGameSpec& spec) {
  spec.validate();
  double pm = spec.source_power, pw = spec.noise_power, lam = spec.lambda;
  double b = spec.bias;

  EquilibriumReport report;
  if (lam > 0 && lam < spec.power_ratio()) {
    AffinePairScalar pair = nash_informative_pair(spec);
    report.cls = EquilibriumClass::InformativeAffine;
    report.policy = pair;
    double k2 = pair.K * pair.K;
    // Encoder cost at the best response to (K, L).
    report.encoder_cost =
        lam / (k2 + lam) * (pm + (pair.L + b) * (pair.L + b)) + k2 * pw;
    report.decoder_cost = std::sqrt(lam * pm * pw);
    report.diagnostics.fixed_point_residual =
        std::abs(t_map(pair.A, spec) - pair.A);
  } else {
    report.cls = EquilibriumClass::NonInformative;
    report.policy = babbling_pair();
    report.encoder_cost = pm + b * b;
    report.decoder_cost = pm;
    report.diagnostics.fixed_point_residual = 0.0;
    if (lam == 0.0) report.flags.push_back(kFlagNoAffineInformative);
  }
  report.total_cost = report.encoder_cost + report.decoder_cost;
  return report;
}

GameCosts game_costs(const ScalarGameSpec& spec) {
  spec.validate();
  double pm = spec.source_power, pw = spec.noise_power, lam = spec.lambda;
  double b2 = spec.bias * spec.bias;

  GameCosts out;
  out.uninformative = 2.0 * pm + b2;
  if (lam > 0 && lam < spec.power_ratio()) {
    out.informative = 3.0 * std::sqrt(lam * pm * pw) +
                      b2 * std::sqrt(pm / (lam * pw)) - lam * pw;
    out.babbling_preferred = out.uninformative < *out.informative;
    out.equilibrium_total = std::min(*out.informative, out.uninformative);
  } else {
    out.equilibrium_total = out.uninformative;
  }
  return out;
}

TeamCosts team_costs(const ScalarGameSpec& spec) {
  spec.validate();
  double pm = spec.source_power, pw = spec.noise_power, lam = spec.lambda;
  double b = spec.bias;

  TeamCosts out;
  out.uninformative = 2.0 * pm + 0.5 * b * b;
  out.uninformative_policy = AffinePairScalar{0.0, 0.0, 0.0, -0.5 * b};

  if (lam > 0 && lam < 2.0 * spec.power_ratio()) {
    double k2 = std::sqrt(lam * pm / (2.0 * pw)) - 0.5 * lam;
    double k = std::sqrt(k2);
    double l = -0.5 * b;
    AffinePairScalar pair{2.0 * k / (2.0 * k2 + lam), 0.0, k, l};
    out.informative_policy = pair;
    // Team cost of the jointly optimal affine pair (C = 0, L = -b/2).
    out.informative = (b * b * k2 + lam * (2.0 * pm + (l + b) * (l + b) +
                                           l * l)) /
                          (2.0 * k2 + lam) +
                      2.0 * k2 * pw;
    out.babbling_preferred = out.uninformative < *out.informative;
    out.optimal_total = std::min(*out.informative, out.uninformative);
  } else if (lam == 0.0) {
    // Free channel: x = t m reveals the source as t grows; the team cost
    // approaches b^2/2 but no affine minimizer attains it.
    out.optimal_total = 0.5 * b * b;
  } else {
    out.optimal_total = out.uninformative;
  }
  return out;
}

PriceOfAnarchy price_of_anarchy(const ScalarGameSpec& spec) {
  spec.validate();
  PriceOfAnarchy out;
  double team_total = team_costs(spec).optimal_total;
  // lambda = 0 with b = 0 has zero team cost; the ratio saturates at +inf.
  out.value = team_total > 0
                  ? game_costs(spec).equilibrium_total / team_total
                  : kInf;
  out.babbling_corner =
      spec.bias == 0.0 && spec.lambda >= 2.0 * spec.power_ratio();
  return out;
}

double it_bound_game(const ScalarGameSpec& spec, double power) {
  spec.validate();
  if (!(power >= 0))
    throw std::domain_error("it_bound_game: power >= 0 required");
  return spec.bias * spec.bias + spec.lambda * power +
         spec.source_power / (1.0 + power / spec.noise_power);
}

OptimalItBound it_bound_optimal(const ScalarGameSpec& spec) {
  spec.validate();
  double pm = spec.source_power, pw = spec.noise_power, lam = spec.lambda;
  double b2 = spec.bias * spec.bias;
  if (lam == 0.0) return {kInf, b2};
  if (lam >= spec.power_ratio()) return {0.0, pm + b2};
  double p_star = std::sqrt(pm * pw / lam) - pw;
  return {p_star, 2.0 * std::sqrt(lam * pm * pw) + b2 - lam * pw};
}

double it_bound_game_total(const ScalarGameSpec& spec) {
  spec.validate();
  double pm = spec.source_power, pw = spec.noise_power, lam = spec.lambda;
  double b2 = spec.bias * spec.bias;
  if (lam >= spec.power_ratio()) return 2.0 * pm + b2;
  return 3.0 * std::sqrt(lam * pm * pw) + b2 - lam * pw;
}

double it_bound_team(const ScalarGameSpec& spec, double power) {
  spec.validate();
  if (!(power >= 0))
    throw std::domain_error("it_bound_team: power >= 0 required");
  return 0.5 * spec.bias * spec.bias + spec.lambda * power +
         2.0 * spec.source_power / (1.0 + power / spec.noise_power);
}

OptimalItBound it_bound_team_optimal(const ScalarGameSpec& spec) {
  spec.validate();
  double pm = spec.source_power, pw = spec.noise_power, lam = spec.lambda;
  double b2 = spec.bias * spec.bias;
  if (lam == 0.0) return {kInf, 0.5 * b2};
  if (lam >= 2.0 * spec.power_ratio()) return {0.0, 2.0 * pm + 0.5 * b2};
  double p_star = std::sqrt(2.0 * pm * pw / lam) - pw;
  return {p_star,
          2.0 * std::sqrt(2.0 * lam * pm * pw) + 0.5 * b2 - lam * pw};
}

EquilibriumReport solve_stackelberg(const ScalarGameSpec& spec) {
  spec.validate();
  if (!(spec.lambda > 0))
    throw std::domain_error("solve_stackelberg: lambda > 0 required");
  double pm = spec.source_power, pw = spec.noise_power, lam = spec.lambda;
  double b2 = spec.bias * spec.bias;

  EquilibriumReport report;
  report.cls = EquilibriumClass::Stackelberg;
  AffinePairScalar pair;
  if (lam >= spec.power_ratio()) {
    pair = babbling_pair();
  } else {
    pair.A = std::sqrt(std::sqrt(pw / (lam * pm)) - pw / pm);
    pair.C = 0.0;
    pair.K = pair.A * pm / (pair.A * pair.A * pm + pw);
    pair.L = 0.0;
  }
  // Leader cost evaluated against the follower's best response.
  double denom = pair.A * pair.A * pm + pw;
  report.encoder_cost =
      pm * pw / denom + b2 + lam * pair.A * pair.A * pm + lam * pair.C * pair.C;
  report.decoder_cost = pm * pw / denom;
  report.total_cost = report.encoder_cost + report.decoder_cost;
  report.policy = pair;
  return report;
}

double noisy_indifference_point(const ScalarGameSpec& spec, double x_alpha,
                                double x_beta,
                                const AffinePairScalar& decoder) {
  spec.validate();
  double k = decoder.K, l = decoder.L;
  double mean_a = k * x_alpha + l;
  double mean_b = k * x_beta + l;
  if (mean_a == mean_b)
    throw ValidationError(
        "noisy_indifference_point: equal conditional decoder means");
  double second_a = mean_a * mean_a + k * k * spec.noise_power;
  double second_b = mean_b * mean_b + k * k * spec.noise_power;
  double denom = 2.0 * (mean_b - mean_a);
  return (second_b - second_a) / denom +
         spec.lambda * (x_beta * x_beta - x_alpha * x_alpha) / denom +
         spec.bias;
}

}  // namespace siggame
