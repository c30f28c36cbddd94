#include "siggame/signaling_multi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "siggame/errors.hpp"
#include "siggame/rng.hpp"

namespace siggame {
namespace {

constexpr double kSingularTol = 1e-10;   // rank cutoff on singular values
constexpr double kSymmetryTol = 1e-12;
constexpr double kDedupeTol = 1e-4;      // elementwise class identification

// SPD solve with a generic LU fallback for matrices that lost definiteness
// to roundoff.
Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& lhs,
                          const Eigen::MatrixXd& rhs) {
  Eigen::LLT<Eigen::MatrixXd> llt(lhs);
  if (llt.info() == Eigen::Success) return llt.solve(rhs);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible())
    throw SolverFailureError("spd_solve: singular system");
  return lu.solve(rhs);
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues().minCoeff();
}

bool is_scaled_identity(const Eigen::MatrixXd& m, double* scale) {
  int n = static_cast<int>(m.rows());
  double s = m.trace() / n;
  if ((m - s * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() >
      kSymmetryTol)
    return false;
  *scale = s;
  return true;
}

}  // namespace

void MatrixGameSpec::validate() const {
  int n = dimension();
  if (n < 1) throw std::invalid_argument("matrix game spec: empty covariance");
  if (source_cov.rows() != source_cov.cols() || noise_cov.rows() != n ||
      noise_cov.cols() != n || bias.size() != n)
    throw std::invalid_argument("matrix game spec: dimension mismatch");
  if ((source_cov - source_cov.transpose()).cwiseAbs().maxCoeff() >
          kSymmetryTol ||
      (noise_cov - noise_cov.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
    throw std::invalid_argument("matrix game spec: covariances not symmetric");
  if (!(min_eigenvalue(source_cov) > 0) || !(min_eigenvalue(noise_cov) > 0))
    throw std::invalid_argument(
        "matrix game spec: covariances must be positive definite");
  if (!(lambda > 0) || !std::isfinite(lambda))
    throw std::invalid_argument("matrix game spec: lambda > 0 required");
}

double t_map_matrix_bound(const MatrixGameSpec& spec) {
  return spec.dimension() * std::max(1.0, 1.0 / (spec.lambda * spec.lambda));
}

Eigen::MatrixXd t_map_matrix(const Eigen::MatrixXd& a,
                             const MatrixGameSpec& spec) {
  spec.validate();
  int n = spec.dimension();
  if (a.rows() != n || a.cols() != n)
    throw std::invalid_argument("t_map_matrix: slope has wrong shape");
  Eigen::MatrixXd f =
      spd_solve(a * spec.source_cov * a.transpose() + spec.noise_cov,
                a * spec.source_cov);
  Eigen::MatrixXd lhs =
      f * f.transpose() +
      spec.lambda * Eigen::MatrixXd::Identity(n, n);
  return spd_solve(lhs, f);
}

MatrixFixedPoint solve_fixed_point(const MatrixGameSpec& spec,
                                   Eigen::MatrixXd a0, double damping,
                                   double tol, int cap) {
  if (!(damping > 0) || damping > 1)
    throw std::invalid_argument("solve_fixed_point: damping in (0, 1]");
  if (!(tol > 0)) throw std::invalid_argument("solve_fixed_point: tol > 0");

  MatrixFixedPoint out;
  out.a = a0;
  double best_residual = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best = a0;
  Eigen::MatrixXd a = std::move(a0);

  for (out.iterations = 0; out.iterations < cap; ++out.iterations) {
    Eigen::MatrixXd mapped = t_map_matrix(a, spec);
    double residual = (mapped - a).norm();
    if (residual < best_residual) {
      best_residual = residual;
      best = a;
    }
    if (residual < tol) {
      out.a = a;
      out.residual = residual;
      out.converged = true;
      return out;
    }
    a = (1.0 - damping) * a + damping * mapped;
  }
  out.a = best;
  out.residual = best_residual;
  return out;
}

std::vector<MatrixFixedPoint> multi_start_fixed_points(
    const MatrixGameSpec& spec, int n_starts, std::uint64_t seed, double tol) {
  if (n_starts < 1)
    throw std::invalid_argument("multi_start_fixed_points: n_starts >= 1");
  spec.validate();
  int n = spec.dimension();
  double radius = t_map_matrix_bound(spec);
  RandomStream stream(seed);

  std::vector<MatrixFixedPoint> classes;
  auto record = [&](MatrixFixedPoint&& fp) {
    for (const auto& seen : classes) {
      double d_plus = (fp.a - seen.a).cwiseAbs().maxCoeff();
      double d_minus = (fp.a + seen.a).cwiseAbs().maxCoeff();
      if (std::min(d_plus, d_minus) < kDedupeTol) return;
    }
    classes.push_back(std::move(fp));
  };

  // The zero slope is always a fixed point (babbling); seed it explicitly
  // since random starts rarely settle there.
  record(solve_fixed_point(spec, Eigen::MatrixXd::Zero(n, n), 0.5, tol, 1));

  for (int s = 1; s < n_starts; ++s) {
    Eigen::MatrixXd a0(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a0(i, j) = stream.normal();
    double norm = a0.norm();
    if (norm > 0) {
      double r = radius * std::pow(stream.uniform01(), 1.0 / (n * n));
      a0 *= r / norm;
    }
    MatrixFixedPoint fp = solve_fixed_point(spec, a0, 0.5, tol, 20000);
    if (fp.converged) record(std::move(fp));
  }
  return classes;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> best_response_decoder(
    const Eigen::MatrixXd& a, const Eigen::VectorXd& c,
    const MatrixGameSpec& spec) {
  spec.validate();
  Eigen::MatrixXd f =
      spd_solve(a * spec.source_cov * a.transpose() + spec.noise_cov,
                a * spec.source_cov);
  Eigen::MatrixXd k = f.transpose();
  return {k, -k * c};
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> best_response_encoder(
    const Eigen::MatrixXd& k, const Eigen::VectorXd& l,
    const MatrixGameSpec& spec) {
  spec.validate();
  int n = spec.dimension();
  Eigen::MatrixXd lhs =
      k.transpose() * k + spec.lambda * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd a = spd_solve(lhs, k.transpose());
  Eigen::VectorXd c = -a * (l + spec.bias);
  return {a, c};
}

AffinePairMatrix assemble_affine_pair(const Eigen::MatrixXd& a,
                                      const MatrixGameSpec& spec) {
  spec.validate();
  int n = spec.dimension();
  AffinePairMatrix pair;
  pair.A = a;
  pair.K = best_response_decoder(a, Eigen::VectorXd::Zero(n), spec).first;

  // Intercepts from A b = (AK - I) C; babbling collapses to C = 0.
  Eigen::FullPivLU<Eigen::MatrixXd> lu(pair.A * pair.K -
                                       Eigen::MatrixXd::Identity(n, n));
  lu.setThreshold(1e-12);
  pair.C = lu.isInvertible() ? Eigen::VectorXd(lu.solve(pair.A * spec.bias))
                             : Eigen::VectorXd(Eigen::VectorXd::Zero(n));
  pair.L = -pair.K * pair.C;
  return pair;
}

MatrixCosts affine_pair_costs(const AffinePairMatrix& pair,
                              const MatrixGameSpec& spec) {
  spec.validate();
  int n = spec.dimension();
  const Eigen::MatrixXd& sm = spec.source_cov;
  const Eigen::MatrixXd& sw = spec.noise_cov;

  // u = KA m + Kw + (KC + L); m - u = (I - KA) m - K w - (KC + L).
  Eigen::MatrixXd m_term = Eigen::MatrixXd::Identity(n, n) - pair.K * pair.A;
  Eigen::VectorXd offset = pair.K * pair.C + pair.L;

  double err_var = (m_term * sm * m_term.transpose()).trace() +
                   (pair.K * sw * pair.K.transpose()).trace();
  double power = (pair.A * sm * pair.A.transpose()).trace() +
                 pair.C.squaredNorm();

  MatrixCosts costs;
  costs.decoder = err_var + offset.squaredNorm();
  costs.encoder = err_var + (offset + spec.bias).squaredNorm() +
                  spec.lambda * power;
  costs.total = costs.encoder + costs.decoder;
  return costs;
}

DiagonalDecomposition diagonal_decompose(const MatrixGameSpec& spec) {
  spec.validate();
  int n = spec.dimension();
  Eigen::MatrixXd sm_off = spec.source_cov;
  Eigen::MatrixXd sw_off = spec.noise_cov;
  sm_off.diagonal().setZero();
  sw_off.diagonal().setZero();
  if (sm_off.cwiseAbs().maxCoeff() > kSymmetryTol ||
      sw_off.cwiseAbs().maxCoeff() > kSymmetryTol)
    throw std::invalid_argument(
        "diagonal_decompose: covariances must be diagonal");

  DiagonalDecomposition out;
  out.pair.A = Eigen::MatrixXd::Zero(n, n);
  out.pair.K = Eigen::MatrixXd::Zero(n, n);
  out.pair.C = Eigen::VectorXd::Zero(n);
  out.pair.L = Eigen::VectorXd::Zero(n);

  for (int i = 0; i < n; ++i) {
    ScalarGameSpec coord{spec.source_cov(i, i), spec.noise_cov(i, i),
                         spec.lambda, spec.bias(i)};
    out.coordinates.push_back(coord);
    if (spec.lambda < coord.power_ratio()) {
      AffinePairScalar pair = nash_informative_pair(coord);
      out.pair.A(i, i) = pair.A;
      out.pair.K(i, i) = pair.K;
      out.pair.C(i) = pair.C;
      out.pair.L(i) = pair.L;
      out.informative = true;
    }
  }
  return out;
}

ExistenceDiagnostics existence_diagnostics(const MatrixGameSpec& spec,
                                           const Eigen::MatrixXd& a) {
  spec.validate();
  int n = spec.dimension();
  ExistenceDiagnostics out;
  out.lambda_pow_n = std::pow(spec.lambda, n);
  out.cov_det_ratio =
      spec.source_cov.determinant() / spec.noise_cov.determinant();
  out.determinant_condition = out.lambda_pow_n <= out.cov_det_ratio;

  double scale = 0.0;
  if (is_scaled_identity(spec.source_cov, &scale)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.noise_cov);
    out.iid_source_condition =
        spec.lambda <= scale / es.eigenvalues().maxCoeff();
  }
  if (is_scaled_identity(spec.noise_cov, &scale)) {
    out.iid_noise_condition = spec.lambda <= min_eigenvalue(spec.source_cov) /
                                                 scale;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  out.min_singular_value = svd.singularValues().minCoeff();
  out.supplied_singular = out.min_singular_value < kSingularTol;
  out.consistent = out.determinant_condition || out.supplied_singular;
  return out;
}

WaterFill water_fill(double total_power,
                     const std::vector<double>& noise_eigenvalues) {
  if (!(total_power >= 0))
    throw std::invalid_argument("water_fill: total_power >= 0");
  if (noise_eigenvalues.empty())
    throw std::invalid_argument("water_fill: no eigenvalues");
  for (double ev : noise_eigenvalues) {
    if (!(ev > 0))
      throw std::invalid_argument("water_fill: eigenvalues must be positive");
  }
  const double n = static_cast<double>(noise_eigenvalues.size());
  const double target = n * total_power;
  double lo = *std::min_element(noise_eigenvalues.begin(),
                                noise_eigenvalues.end());
  WaterFill out;
  out.allocations.assign(noise_eigenvalues.size(), 0.0);
  if (target == 0.0) {
    out.level = lo;
    return out;
  }

  auto filled = [&](double nu) {
    double s = 0.0;
    for (double ev : noise_eigenvalues) s += std::max(nu - ev, 0.0);
    return s;
  };
  double hi = *std::max_element(noise_eigenvalues.begin(),
                                noise_eigenvalues.end()) +
              target;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    double mid = 0.5 * (lo + hi);
    (filled(mid) < target ? lo : hi) = mid;
  }
  out.level = 0.5 * (lo + hi);
  for (size_t i = 0; i < noise_eigenvalues.size(); ++i)
    out.allocations[i] = std::max(out.level - noise_eigenvalues[i], 0.0);
  return out;
}

double it_bound_multi(const MatrixGameSpec& spec, double power) {
  spec.validate();
  if (!(power >= 0))
    throw std::domain_error("it_bound_multi: power >= 0 required");
  double n = spec.dimension();
  double det_m = spec.source_cov.determinant();
  double det_w = spec.noise_cov.determinant();
  double distortion = n * std::pow(det_m, 1.0 / n) *
                      std::pow(det_w, 1.0 / (n * n)) *
                      std::pow(power + spec.noise_cov.trace() / n, -1.0 / n);
  return spec.bias.squaredNorm() + spec.lambda * power + distortion;
}

double it_bound_multi_threshold(const MatrixGameSpec& spec) {
  spec.validate();
  double n = spec.dimension();
  return std::pow(spec.source_cov.determinant(), 1.0 / n) *
         std::pow(spec.noise_cov.determinant(), -1.0 / n);
}

}  // namespace siggame
