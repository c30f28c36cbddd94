#pragma once

#include <optional>

#include "siggame/report.hpp"

namespace siggame {

// Scalar Gaussian signaling game: zero-mean Gaussian source over an additive
// Gaussian channel, encoder cost (m-u-b)^2 + lambda x^2, decoder cost
// (m-u)^2.
struct ScalarGameSpec {
  double source_power = 1.0;  // E[m^2]
  double noise_power = 1.0;   // E[w^2]
  double lambda = 0.0;        // power weight, >= 0
  double bias = 0.0;

  // E[m^2]/E[w^2]; informative affine equilibria need lambda below this.
  double power_ratio() const { return source_power / noise_power; }

  void validate() const;  // throws std::invalid_argument
};

// Best-response composition T(A); its nonzero fixed points are the
// informative affine equilibria. Requires lambda > 0 (throws
// std::domain_error otherwise; the lambda = 0 regime has no informative
// affine equilibrium and is handled by solve_affine_nash directly).
double t_map(double a, const ScalarGameSpec& spec);

struct FixedPointIteration {
  double a = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Damped iteration a <- (1-damping) a + damping T(a). Supplements the
// closed forms as an independent numerical route.
FixedPointIteration iterate_t_map(const ScalarGameSpec& spec, double a0,
                                  double damping = 0.5, double tol = 1e-13,
                                  int cap = 100000);

// Number of sign changes of T(a) - a on a grid over (0, a_max]; the
// informative equilibrium is unique, so this is 1 in the informative regime.
int count_nonzero_fixed_points(const ScalarGameSpec& spec,
                               int grid_points = 10000);

// Upper end of the self-mapped interval of T: max(ratio, 1)/lambda.
double t_map_bound(const ScalarGameSpec& spec);

// The informative affine pair in closed form (requires
// 0 < lambda < power ratio). `sign` selects the +/-A root; costs do not
// depend on it.
AffinePairScalar nash_informative_pair(const ScalarGameSpec& spec,
                                       int sign = +1);

// Full Nash solution across the three lambda regimes.
EquilibriumReport solve_affine_nash(const ScalarGameSpec& spec);

// Babbling pair (x = 0, u = prior mean = 0).
AffinePairScalar babbling_pair();

// Exact encoder/decoder costs of an arbitrary affine pair under the
// Gaussian model (not just equilibrium pairs).
struct ScalarCosts {
  double encoder = 0.0;
  double decoder = 0.0;
  double total = 0.0;
};
ScalarCosts affine_pair_costs(const AffinePairScalar& pair,
                              const ScalarGameSpec& spec);

struct GameCosts {
  std::optional<double> informative;  // g_i, defined for 0 < lambda < ratio
  double uninformative = 0.0;         // g_u = 2 E[m^2] + b^2
  double equilibrium_total = 0.0;     // min of the applicable costs
  bool babbling_preferred = false;    // g_u < g_i inside the informative regime
};

GameCosts game_costs(const ScalarGameSpec& spec);

struct TeamCosts {
  std::optional<double> informative;  // t_i, defined for lambda < 2 ratio
  double uninformative = 0.0;         // t_u = 2 E[m^2] + b^2/2
  double optimal_total = 0.0;
  std::optional<AffinePairScalar> informative_policy;
  AffinePairScalar uninformative_policy;  // x = 0, u = -b/2
  bool babbling_preferred = false;
};

TeamCosts team_costs(const ScalarGameSpec& spec);

struct PriceOfAnarchy {
  double value = 1.0;
  // True at the b = 0 double-babbling corner, the one spot where the game
  // and team totals coincide and the ratio equals 1.
  bool babbling_corner = false;
};

PriceOfAnarchy price_of_anarchy(const ScalarGameSpec& spec);

// Encoder-cost lower bound b^2 + lambda P + E[m^2]/(1 + P/E[w^2]) at
// transmit power P >= 0.
double it_bound_game(const ScalarGameSpec& spec, double power);

struct OptimalItBound {
  double power = 0.0;
  double bound = 0.0;
};

// Minimizer of it_bound_game over P and its value. For lambda = 0 the
// infimum b^2 is approached as P grows without bound; power is +infinity.
OptimalItBound it_bound_optimal(const ScalarGameSpec& spec);

// Lower bound on the total game cost J_e + J_d at the optimal power.
double it_bound_game_total(const ScalarGameSpec& spec);

// Team-cost lower bound b^2/2 + lambda P + 2 E[m^2]/(1 + P/E[w^2]) and its
// minimum over P.
double it_bound_team(const ScalarGameSpec& spec, double power);
OptimalItBound it_bound_team_optimal(const ScalarGameSpec& spec);

// Stackelberg solution of the noisy game: the encoder commits to a linear
// policy (C = 0) and meets the information-theoretic bound. Requires
// lambda > 0.
EquilibriumReport solve_stackelberg(const ScalarGameSpec& spec);

// Indifference point between two encoder outputs under an affine decoder,
// using the closed-form Gaussian channel moments
// E[u|x] = Kx + L, E[u^2|x] = (Kx+L)^2 + K^2 E[w^2].
double noisy_indifference_point(const ScalarGameSpec& spec, double x_alpha,
                                double x_beta, const AffinePairScalar& decoder);

}  // namespace siggame
