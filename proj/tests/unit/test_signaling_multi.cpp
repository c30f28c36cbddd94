#include <cmath>

#include "doctest.h"
#include "siggame/reference_case.hpp"
#include "siggame/rng.hpp"
#include "siggame/signaling_multi.hpp"

using namespace siggame;

namespace {

MatrixGameSpec scalar_embedded(double pm, double pw, double lambda,
                               double bias) {
  MatrixGameSpec spec;
  spec.source_cov = Eigen::MatrixXd::Constant(1, 1, pm);
  spec.noise_cov = Eigen::MatrixXd::Constant(1, 1, pw);
  spec.lambda = lambda;
  spec.bias = Eigen::VectorXd::Constant(1, bias);
  return spec;
}

MatrixGameSpec random_spd_spec(RandomStream& r, int n, double lambda) {
  Eigen::MatrixXd gm(n, n), gw(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      gm(i, j) = r.normal();
      gw(i, j) = r.normal();
    }
  MatrixGameSpec spec;
  spec.source_cov = gm * gm.transpose() +
                    0.5 * Eigen::MatrixXd::Identity(n, n);
  spec.noise_cov = gw * gw.transpose() +
                   0.5 * Eigen::MatrixXd::Identity(n, n);
  spec.lambda = lambda;
  spec.bias = Eigen::VectorXd::Zero(n);
  return spec;
}

}  // namespace

TEST_CASE("t_map_matrix basics") {
  auto spec = reference_case_4d();
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(4, 4);
  CHECK(t_map_matrix(zero, spec).norm() == 0.0);

  // 1-dimensional reduction agrees with the scalar map on a grid.
  auto spec1 = scalar_embedded(1.7, 0.6, 0.4, 0.0);
  ScalarGameSpec scal{1.7, 0.6, 0.4, 0.0};
  for (int i = 0; i < 1000; ++i) {
    double a = -4.0 + 8.0 * i / 999.0;
    Eigen::MatrixXd am = Eigen::MatrixXd::Constant(1, 1, a);
    CHECK(t_map_matrix(am, spec1)(0, 0) ==
          doctest::Approx(t_map(a, scal)).epsilon(1e-12));
  }
}

TEST_CASE("reference 4d fixed points satisfy the map at print precision") {
  auto spec = reference_case_4d();
  for (const auto& a : reference_fixed_points_4d()) {
    CHECK((t_map_matrix(a, spec) - a).norm() < 5e-3);
  }
}

TEST_CASE("frobenius bound holds for the map and along iterates") {
  RandomStream r(21);
  auto spec = reference_case_4d();
  double bound = t_map_matrix_bound(spec);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd a(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = 3.0 * r.normal();
    CHECK(t_map_matrix(a, spec).norm() < bound);
  }

  // Every iterate after the first application stays inside the ball.
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(4, 4, 2.0);
  for (int k = 0; k < 50; ++k) {
    a = 0.5 * a + 0.5 * t_map_matrix(a, spec);
    if (k >= 1) CHECK(a.norm() < bound);
  }
}

TEST_CASE("solve_fixed_point reconverges from perturbed reference points") {
  auto spec = reference_case_4d();
  RandomStream r(22);
  for (const auto& printed : reference_fixed_points_4d()) {
    Eigen::MatrixXd start = printed;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        start(i, j) += 2e-3 * (r.uniform01() - 0.5);
    auto fp = solve_fixed_point(spec, start, 0.5, 1e-12, 50000);
    CHECK(fp.converged);
    CHECK(fp.residual < 1e-12);
    CHECK((fp.a - printed).cwiseAbs().maxCoeff() < 2e-3);
  }

  auto from_zero =
      solve_fixed_point(spec, Eigen::MatrixXd::Zero(4, 4), 0.5, 1e-12, 10);
  CHECK(from_zero.converged);
  CHECK(from_zero.iterations == 0);
}

TEST_CASE("sign symmetry of fixed points") {
  auto spec = reference_case_4d();
  for (const auto& printed : reference_fixed_points_4d()) {
    auto fp = solve_fixed_point(spec, printed, 0.5, 1e-12, 50000);
    REQUIRE(fp.converged);
    CHECK((t_map_matrix(-fp.a, spec) + fp.a).norm() < 1e-10);
  }
}

TEST_CASE("multi-start recovers both nonzero classes plus babbling") {
  auto spec = reference_case_4d();
  auto classes = multi_start_fixed_points(spec, 80, 7);
  auto printed = reference_fixed_points_4d();

  bool found_zero = false;
  int matched[2] = {0, 0};
  int nonzero = 0;
  for (const auto& fp : classes) {
    if (fp.a.norm() < 1e-6) {
      found_zero = true;
      continue;
    }
    ++nonzero;
    for (int k = 0; k < 2; ++k) {
      double d = std::min((fp.a - printed[k]).cwiseAbs().maxCoeff(),
                          (fp.a + printed[k]).cwiseAbs().maxCoeff());
      if (d < 2e-3) ++matched[k];
    }
  }
  CHECK(found_zero);
  CHECK(nonzero >= 2);
  CHECK(matched[0] == 1);
  CHECK(matched[1] == 1);

  // Solution classes do not depend on the seed.
  auto classes2 = multi_start_fixed_points(spec, 80, 1234);
  CHECK(classes2.size() == classes.size());
}

TEST_CASE("multi-start on an embedded scalar spec finds one nonzero class") {
  auto spec = scalar_embedded(1, 1, 0.25, 0.0);
  auto classes = multi_start_fixed_points(spec, 40, 3);
  int nonzero = 0;
  for (const auto& fp : classes) {
    if (fp.a.norm() > 1e-6) {
      ++nonzero;
      CHECK(std::abs(fp.a(0, 0)) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  CHECK(nonzero == 1);
}

TEST_CASE("above the determinant threshold every nonzero class is singular") {
  // The reference case sits just past lambda^n = |Sm|/|Sw|, so nonzero
  // fixed points must have singular slopes.
  auto spec = reference_case_4d();
  auto classes = multi_start_fixed_points(spec, 60, 17);
  for (const auto& fp : classes) {
    if (fp.a.norm() < 1e-6) continue;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(fp.a);
    CHECK(svd.singularValues().minCoeff() < 1e-10);
  }
}

TEST_CASE("best responses") {
  MatrixGameSpec spec;
  spec.source_cov = Eigen::MatrixXd::Identity(2, 2);
  spec.noise_cov = Eigen::MatrixXd::Identity(2, 2);
  spec.lambda = 0.25;
  spec.bias = Eigen::VectorXd::Zero(2);

  auto [k, l] = best_response_decoder(Eigen::MatrixXd::Identity(2, 2),
                                      Eigen::VectorXd::Zero(2), spec);
  CHECK((k - 0.5 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);
  CHECK(l.norm() == 0.0);

  // Babbling is closed under the encoder best response.
  auto [a0, c0] = best_response_encoder(Eigen::MatrixXd::Zero(2, 2),
                                        Eigen::VectorXd::Zero(2), spec);
  CHECK(a0.norm() == 0.0);
  CHECK(c0.norm() == 0.0);
}

TEST_CASE("composing best responses reproduces the map") {
  RandomStream r(23);
  auto spec = reference_case_4d();
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd a(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = 2.0 * r.normal();
    auto [k, l] = best_response_decoder(a, Eigen::VectorXd::Zero(4), spec);
    auto [a2, c2] = best_response_encoder(k, l, spec);
    CHECK((a2 - t_map_matrix(a, spec)).norm() < 1e-10);
  }
}

TEST_CASE("equilibrium pair satisfies the short-form identity") {
  // lambda A Sm A^T = K^T K Sw at any nonsingular-free fixed point.
  auto spec = reference_case_4d();
  for (const auto& printed : reference_fixed_points_4d()) {
    auto fp = solve_fixed_point(spec, printed, 0.5, 1e-13, 100000);
    REQUIRE(fp.converged);
    auto pair = assemble_affine_pair(fp.a, spec);
    Eigen::MatrixXd lhs =
        spec.lambda * pair.A * spec.source_cov * pair.A.transpose();
    Eigen::MatrixXd rhs = pair.K.transpose() * pair.K * spec.noise_cov;
    CHECK((lhs - rhs).norm() < 1e-8);
    // All four pair identities at equilibrium.
    auto [k_br, l_br] = best_response_decoder(pair.A, pair.C, spec);
    CHECK((pair.K - k_br).norm() < 1e-8);
    CHECK((pair.L - l_br).norm() < 1e-8);
    auto [a_br, c_br] = best_response_encoder(pair.K, pair.L, spec);
    CHECK((pair.A - a_br).norm() < 1e-8);
    CHECK((pair.C - c_br).norm() < 1e-8);
  }
}

TEST_CASE("diagonal decomposition matches the scalar solver per coordinate") {
  MatrixGameSpec spec;
  spec.source_cov = Eigen::Vector2d(1.0, 1.0).asDiagonal();
  spec.noise_cov = Eigen::Vector2d(1.0, 1.0).asDiagonal();
  spec.lambda = 0.25;
  spec.bias = Eigen::VectorXd::Zero(2);
  auto decomp = diagonal_decompose(spec);
  CHECK(decomp.informative);
  CHECK((decomp.pair.A - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);

  // Mixed regime: only the first coordinate clears the threshold.
  MatrixGameSpec mixed;
  mixed.source_cov = Eigen::Vector2d(1.0, 0.1).asDiagonal();
  mixed.noise_cov = Eigen::Vector2d(1.0, 1.0).asDiagonal();
  mixed.lambda = 0.5;
  mixed.bias = Eigen::VectorXd::Zero(2);
  auto dm = diagonal_decompose(mixed);
  CHECK(dm.informative);
  CHECK(dm.pair.A(0, 0) != 0.0);
  CHECK(dm.pair.A(1, 1) == 0.0);

  // Above every ratio: all-zero slope.
  mixed.lambda = 1.5;
  auto dz = diagonal_decompose(mixed);
  CHECK(!dz.informative);
  CHECK(dz.pair.A.norm() == 0.0);

  // Matrix fixed-point solver agrees with the assembled diagonal solution.
  RandomStream r(24);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + static_cast<int>(r.uniform01() * 3);
    Eigen::VectorXd sm(n), sw(n);
    for (int i = 0; i < n; ++i) {
      sm(i) = 0.3 + 2.0 * r.uniform01();
      sw(i) = 0.3 + 2.0 * r.uniform01();
    }
    MatrixGameSpec ds;
    ds.source_cov = sm.asDiagonal();
    ds.noise_cov = sw.asDiagonal();
    ds.lambda = 0.05 + r.uniform01();
    ds.bias = Eigen::VectorXd::Zero(n);

    auto scalar_side = diagonal_decompose(ds);
    double start = 0.1;
    auto fp = solve_fixed_point(
        ds, start * Eigen::MatrixXd::Identity(n, n), 0.5, 1e-13, 200000);
    REQUIRE(fp.converged);
    Eigen::MatrixXd diff = fp.a.cwiseAbs() - scalar_side.pair.A.cwiseAbs();
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-9);
  }

  MatrixGameSpec off = spec;
  off.source_cov(0, 1) = off.source_cov(1, 0) = 0.2;
  CHECK_THROWS_AS(diagonal_decompose(off), std::invalid_argument);
}

TEST_CASE("existence diagnostics on the reference case") {
  auto spec = reference_case_4d();
  auto fp = solve_fixed_point(spec, reference_fixed_points_4d()[0], 0.5,
                              1e-12, 50000);
  REQUIRE(fp.converged);
  auto diag = existence_diagnostics(spec, fp.a);
  // lambda^4 = 1.13032 narrowly exceeds |Sm|/|Sw| = 1.13005, so the
  // necessary condition for a nonsingular slope fails and the fixed point
  // is indeed singular; the report must be internally consistent.
  CHECK(diag.lambda_pow_n == doctest::Approx(1.1303245).epsilon(1e-6));
  CHECK(diag.cov_det_ratio == doctest::Approx(1.1300491).epsilon(1e-6));
  CHECK(!diag.determinant_condition);
  CHECK(diag.supplied_singular);
  CHECK(diag.consistent);

  // A nonsingular slope claimed in the same regime is flagged.
  auto bad = existence_diagnostics(spec, Eigen::MatrixXd::Identity(4, 4));
  CHECK(!bad.consistent);
}

TEST_CASE("existence diagnostics iid specializations") {
  MatrixGameSpec spec;
  spec.source_cov = 2.0 * Eigen::MatrixXd::Identity(3, 3);
  Eigen::Vector3d noise(0.5, 1.0, 2.0);
  spec.noise_cov = noise.asDiagonal();
  spec.lambda = 0.9;
  spec.bias = Eigen::VectorXd::Zero(3);
  auto diag = existence_diagnostics(spec, Eigen::MatrixXd::Zero(3, 3));
  REQUIRE(diag.iid_source_condition.has_value());
  CHECK(*diag.iid_source_condition);  // 0.9 <= 2.0 / 2.0
  CHECK(!diag.iid_noise_condition.has_value());

  spec.lambda = 1.1;
  auto tight = existence_diagnostics(spec, Eigen::MatrixXd::Zero(3, 3));
  CHECK(!*tight.iid_source_condition);
}

TEST_CASE("water filling") {
  auto zero = water_fill(0.0, {1.0, 2.0});
  CHECK(zero.level == doctest::Approx(1.0));
  CHECK(zero.allocations[0] == 0.0);
  CHECK(zero.allocations[1] == 0.0);

  auto equal = water_fill(0.7, {0.9, 0.9, 0.9});
  CHECK(equal.level == doctest::Approx(0.9 + 0.7).epsilon(1e-12));
  for (double p : equal.allocations) CHECK(p == doctest::Approx(0.7));

  // Frozen hand bisection: eigenvalues (1, 2), P = 0.25 -> nu = 1.5.
  auto uneven = water_fill(0.25, {1.0, 2.0});
  CHECK(uneven.level == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(uneven.allocations[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(uneven.allocations[1] == 0.0);
  CHECK(std::abs(uneven.allocations[0] + uneven.allocations[1] - 2 * 0.25) <
        1e-12);

  // Residual, nonnegativity and monotonicity on random instances.
  RandomStream r(25);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + static_cast<int>(r.uniform01() * 7);
    std::vector<double> ev(n);
    for (double& e : ev) e = 0.1 + 5.0 * r.uniform01();
    double prev_level = -1.0;
    for (double p : {0.0, 0.1, 0.5, 2.0}) {
      auto wf = water_fill(p, ev);
      double sum = 0.0;
      for (size_t i = 0; i < ev.size(); ++i) {
        CHECK(wf.allocations[i] >= 0.0);
        sum += wf.allocations[i];
      }
      CHECK(std::abs(sum - n * p) < 1e-10);
      CHECK(wf.level >= prev_level);
      prev_level = wf.level;
    }
  }
}

TEST_CASE("multi-dimensional bound reduces to the scalar bound at n = 1") {
  ScalarGameSpec scal{1.4, 0.8, 0.3, 0.25};
  auto spec = scalar_embedded(1.4, 0.8, 0.3, 0.25);
  for (int i = 0; i < 1000; ++i) {
    double p = 6.0 * i / 999.0;
    CHECK(std::abs(it_bound_multi(spec, p) - it_bound_game(scal, p)) < 1e-12);
  }
}

TEST_CASE("multi-dimensional bound threshold and P = 0 value") {
  MatrixGameSpec spec;
  spec.source_cov = 2.0 * Eigen::MatrixXd::Identity(3, 3);
  spec.noise_cov = 0.5 * Eigen::MatrixXd::Identity(3, 3);
  spec.lambda = 1.0;
  spec.bias = Eigen::Vector3d(0.1, -0.2, 0.3);
  CHECK(it_bound_multi_threshold(spec) == doctest::Approx(4.0).epsilon(1e-12));

  double n = 3;
  double expect = spec.bias.squaredNorm() +
                  n * std::pow(std::pow(2.0, 3.0), 1.0 / n) *
                      std::pow(std::pow(0.5, 3.0), 1.0 / (n * n)) *
                      std::pow(0.5, -1.0 / n);
  CHECK(it_bound_multi(spec, 0.0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(it_bound_multi(spec, -0.1), std::domain_error);
}

TEST_CASE("matrix spec validation") {
  MatrixGameSpec spec = reference_case_4d();
  spec.lambda = 0.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  spec = reference_case_4d();
  spec.source_cov(0, 1) += 1e-6;  // breaks symmetry
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  spec = reference_case_4d();
  spec.noise_cov = -spec.noise_cov;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
