#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "siggame/signaling_scalar.hpp"

namespace siggame {

// Multi-dimensional Gaussian signaling game: n-dimensional zero-mean
// Gaussian source with covariance source_cov over an additive Gaussian
// channel with covariance noise_cov; encoder cost |m-u-b|^2 + lambda |x|^2.
struct MatrixGameSpec {
  Eigen::MatrixXd source_cov;
  Eigen::MatrixXd noise_cov;
  double lambda = 1.0;  // > 0
  Eigen::VectorXd bias;

  int dimension() const { return static_cast<int>(source_cov.rows()); }
  void validate() const;  // symmetry within 1e-12, SPD, lambda > 0
};

// Affine pair x = A m + C, u = K y + L.
struct AffinePairMatrix {
  Eigen::MatrixXd A;
  Eigen::VectorXd C;
  Eigen::MatrixXd K;
  Eigen::VectorXd L;
};

// Best-response composition T(A) = (F F^T + lambda I)^{-1} F with
// F = (A Sm A^T + Sw)^{-1} A Sm. Fixed points are the slopes of affine
// equilibria.
Eigen::MatrixXd t_map_matrix(const Eigen::MatrixXd& a,
                             const MatrixGameSpec& spec);

// Frobenius-norm bound n * max(1, 1/lambda^2) that T maps into.
double t_map_matrix_bound(const MatrixGameSpec& spec);

struct MatrixFixedPoint {
  Eigen::MatrixXd a;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Damped iteration A <- (1-damping) A + damping T(A) until
// |T(A)-A|_F < tol or the cap; on cap exhaustion returns the best iterate
// seen with converged = false.
MatrixFixedPoint solve_fixed_point(const MatrixGameSpec& spec,
                                   Eigen::MatrixXd a0, double damping = 0.5,
                                   double tol = 1e-12, int cap = 100000);

// Random restarts inside the Frobenius ball, deduplicated up to sign
// (A and -A solve the same equilibrium). Non-converged runs are dropped.
std::vector<MatrixFixedPoint> multi_start_fixed_points(
    const MatrixGameSpec& spec, int n_starts, std::uint64_t seed,
    double tol = 1e-12);

// MMSE decoder slope/intercept for encoder (A, C).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> best_response_decoder(
    const Eigen::MatrixXd& a, const Eigen::VectorXd& c,
    const MatrixGameSpec& spec);

// Optimal affine encoder against decoder (K, L).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> best_response_encoder(
    const Eigen::MatrixXd& k, const Eigen::VectorXd& l,
    const MatrixGameSpec& spec);

// Completes a fixed-point slope A into a full affine pair: K from the
// decoder best response, C from the intercept recursion A b = (AK - I) C,
// L = -K C. Falls back to C = 0 when AK - I is numerically singular.
AffinePairMatrix assemble_affine_pair(const Eigen::MatrixXd& a,
                                      const MatrixGameSpec& spec);

// Exact encoder/decoder costs of an affine pair under the Gaussian model.
struct MatrixCosts {
  double encoder = 0.0;
  double decoder = 0.0;
  double total = 0.0;
};
MatrixCosts affine_pair_costs(const AffinePairMatrix& pair,
                              const MatrixGameSpec& spec);

// Diagonal covariances split the game into independent scalar games
// (one per coordinate); an informative equilibrium exists iff
// lambda < max_i source_var_i / noise_var_i.
struct DiagonalDecomposition {
  std::vector<ScalarGameSpec> coordinates;
  AffinePairMatrix pair;
  bool informative = false;
};
DiagonalDecomposition diagonal_decompose(const MatrixGameSpec& spec);

// Necessary conditions for a nonsingular equilibrium slope.
struct ExistenceDiagnostics {
  double lambda_pow_n = 0.0;
  double cov_det_ratio = 0.0;        // |Sm| / |Sw|
  bool determinant_condition = false;  // lambda^n <= |Sm|/|Sw|
  std::optional<bool> iid_source_condition;  // lambda I <= sigma_m^2 Sw^{-1}
  std::optional<bool> iid_noise_condition;   // lambda <= min eig(Sm)/sigma_w^2
  double min_singular_value = 0.0;
  bool supplied_singular = false;      // min singular value < 1e-10
  bool consistent = true;  // no nonsingular A claimed where the condition fails
};
ExistenceDiagnostics existence_diagnostics(const MatrixGameSpec& spec,
                                           const Eigen::MatrixXd& a);

// Water level nu with sum_i max(nu - lambda_i, 0) = n * total_power, plus
// the per-channel allocations.
struct WaterFill {
  double level = 0.0;
  std::vector<double> allocations;
};
WaterFill water_fill(double total_power,
                     const std::vector<double>& noise_eigenvalues);

// Encoder-cost lower bound
// |b|^2 + lambda P + n |Sm|^{1/n} |Sw|^{1/n^2} (P + tr(Sw)/n)^{-1/n}.
double it_bound_multi(const MatrixGameSpec& spec, double power);

// Threshold |Sm|^{1/n} |Sw|^{-1/n}; for lambda at or above it the bound is
// minimized at P = 0.
double it_bound_multi_threshold(const MatrixGameSpec& spec);

}  // namespace siggame
