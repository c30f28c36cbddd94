#include "siggame/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "siggame/errors.hpp"
#include "siggame/rng.hpp"

namespace siggame {
namespace {

constexpr std::uint64_t kSourceStream = 0;
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::int64_t kShard = 1 << 16;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Running sums for one cost channel, accumulated shard by shard in fixed
// order so the reduction is deterministic regardless of scheduling.
struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
  }

  CostEstimate estimate(std::int64_t n) const {
    CostEstimate est;
    est.n = n;
    est.mean = sum / n;
    if (n > 1) {
      double var = (sum_sq - n * est.mean * est.mean) / (n - 1);
      est.std_error = std::sqrt(std::max(var, 0.0) / n);
    }
    return est;
  }
};

struct TripleAccumulator {
  Accumulator encoder, decoder, total;
};

void check_config(const SimConfig& cfg) {
  if (cfg.n_samples < 1)
    throw std::invalid_argument("sim config: n_samples >= 1 required");
}

// Antithetic pairing shares one base counter between samples 2k and 2k+1.
inline std::uint64_t base_counter(const SimConfig& cfg, std::int64_t i) {
  return cfg.antithetic ? static_cast<std::uint64_t>(i) / 2
                        : static_cast<std::uint64_t>(i);
}

inline bool mirrored(const SimConfig& cfg, std::int64_t i) {
  return cfg.antithetic && (i & 1);
}

[[noreturn]] void abort_non_finite(const char* what, double input) {
  std::ostringstream msg;
  msg << "simulation abort: non-finite " << what << " at input " << input;
  throw SimulationAbortError(msg.str());
}

double margin_of(double mean_delta, double std_error) {
  if (std_error > 0) return mean_delta / std_error;
  if (mean_delta > 0) return kInf;
  if (mean_delta < 0) return -kInf;
  return 0.0;
}

void check_steps(const std::vector<double>& steps) {
  if (steps.empty())
    throw std::invalid_argument("deviation_certify: empty step grid");
  for (double s : steps) {
    bool has_negation = false;
    for (double t : steps) {
      if (std::abs(s + t) <= 1e-15 * std::max(1.0, std::abs(s)))
        has_negation = true;
    }
    if (!has_negation)
      throw std::invalid_argument(
          "deviation_certify: step grid must be symmetric around 0");
  }
}

void check_certify_config(const SimConfig& cfg) {
  if (cfg.n_samples < 10000)
    throw std::invalid_argument(
        "deviation_certify: n_samples >= 10^4 required");
}

}  // namespace

SimResult estimate_costs(const std::function<double(double)>& encoder,
                         const std::function<double(double)>& decoder,
                         const ScalarGameSpec& spec, const SimConfig& cfg) {
  spec.validate();
  check_config(cfg);
  CounterRng rng(cfg.seed);
  double sd_m = std::sqrt(spec.source_power);
  double sd_w = std::sqrt(spec.noise_power);

  TripleAccumulator result;
  for (std::int64_t shard_lo = 0; shard_lo < cfg.n_samples;
       shard_lo += kShard) {
    std::int64_t shard_hi = std::min(shard_lo + kShard, cfg.n_samples);
    TripleAccumulator acc;
    for (std::int64_t i = shard_lo; i < shard_hi; ++i) {
      std::uint64_t c = base_counter(cfg, i);
      double sign = mirrored(cfg, i) ? -1.0 : 1.0;
      double m = sign * sd_m * rng.normal(kSourceStream, c);
      double w = sign * sd_w * rng.normal(kNoiseStream, c);
      double x = encoder(m);
      if (!std::isfinite(x)) abort_non_finite("encoder output", m);
      double u = decoder(x + w);
      if (!std::isfinite(u)) abort_non_finite("decoder output", x + w);
      double err = m - u;
      double ce = (err - spec.bias) * (err - spec.bias) +
                  spec.lambda * x * x;
      double cd = err * err;
      acc.encoder.add(ce);
      acc.decoder.add(cd);
      acc.total.add(ce + cd);
    }
    result.encoder.sum += acc.encoder.sum;
    result.encoder.sum_sq += acc.encoder.sum_sq;
    result.decoder.sum += acc.decoder.sum;
    result.decoder.sum_sq += acc.decoder.sum_sq;
    result.total.sum += acc.total.sum;
    result.total.sum_sq += acc.total.sum_sq;
  }
  return SimResult{result.encoder.estimate(cfg.n_samples),
                   result.decoder.estimate(cfg.n_samples),
                   result.total.estimate(cfg.n_samples)};
}

SimResult estimate_costs(const AffinePairScalar& pair,
                         const ScalarGameSpec& spec, const SimConfig& cfg) {
  return estimate_costs(
      [&pair](double m) { return pair.A * m + pair.C; },
      [&pair](double y) { return pair.K * y + pair.L; }, spec, cfg);
}

SimResult estimate_costs(const AffinePairMatrix& pair,
                         const MatrixGameSpec& spec, const SimConfig& cfg) {
  spec.validate();
  check_config(cfg);
  int n = spec.dimension();
  CounterRng rng(cfg.seed);
  Eigen::MatrixXd chol_m = spec.source_cov.llt().matrixL();
  Eigen::MatrixXd chol_w = spec.noise_cov.llt().matrixL();

  TripleAccumulator result;
  Eigen::VectorXd z(n), m(n), w(n);
  for (std::int64_t shard_lo = 0; shard_lo < cfg.n_samples;
       shard_lo += kShard) {
    std::int64_t shard_hi = std::min(shard_lo + kShard, cfg.n_samples);
    TripleAccumulator acc;
    for (std::int64_t i = shard_lo; i < shard_hi; ++i) {
      std::uint64_t c = base_counter(cfg, i);
      double sign = mirrored(cfg, i) ? -1.0 : 1.0;
      for (int k = 0; k < n; ++k)
        z(k) = sign * rng.normal(kSourceStream, c * n + k);
      m = chol_m * z;
      for (int k = 0; k < n; ++k)
        z(k) = sign * rng.normal(kNoiseStream, c * n + k);
      w = chol_w * z;

      Eigen::VectorXd x = pair.A * m + pair.C;
      Eigen::VectorXd u = pair.K * (x + w) + pair.L;
      double ce = (m - u - spec.bias).squaredNorm() +
                  spec.lambda * x.squaredNorm();
      double cd = (m - u).squaredNorm();
      acc.encoder.add(ce);
      acc.decoder.add(cd);
      acc.total.add(ce + cd);
    }
    result.encoder.sum += acc.encoder.sum;
    result.encoder.sum_sq += acc.encoder.sum_sq;
    result.decoder.sum += acc.decoder.sum;
    result.decoder.sum_sq += acc.decoder.sum_sq;
    result.total.sum += acc.total.sum;
    result.total.sum_sq += acc.total.sum_sq;
  }
  return SimResult{result.encoder.estimate(cfg.n_samples),
                   result.decoder.estimate(cfg.n_samples),
                   result.total.estimate(cfg.n_samples)};
}

DeviationCertificate deviation_certify(const AffinePairScalar& pair,
                                       const ScalarGameSpec& spec,
                                       const SimConfig& cfg,
                                       const std::vector<double>& steps) {
  spec.validate();
  check_certify_config(cfg);
  check_steps(steps);
  CounterRng rng(cfg.seed);
  double sd_m = std::sqrt(spec.source_power);
  double sd_w = std::sqrt(spec.noise_power);

  // Cache the common-random-number sample set once; every perturbation is
  // evaluated against exactly this set.
  std::vector<double> ms(cfg.n_samples), ws(cfg.n_samples);
  for (std::int64_t i = 0; i < cfg.n_samples; ++i) {
    std::uint64_t c = base_counter(cfg, i);
    double sign = mirrored(cfg, i) ? -1.0 : 1.0;
    ms[i] = sign * sd_m * rng.normal(kSourceStream, c);
    ws[i] = sign * sd_w * rng.normal(kNoiseStream, c);
  }

  auto encoder_cost = [&](double a, double c_coef, double m, double w) {
    double x = a * m + c_coef;
    double u = pair.K * (x + w) + pair.L;
    double d = m - u - spec.bias;
    return d * d + spec.lambda * x * x;
  };
  auto decoder_cost = [&](double k, double l, double m, double w) {
    double y = pair.A * m + pair.C + w;
    double d = m - (k * y + l);
    return d * d;
  };

  DeviationCertificate cert;
  cert.worst_margin = kInf;
  auto run = [&](const std::string& name, double step, auto&& delta_fn) {
    Accumulator acc;
    for (std::int64_t i = 0; i < cfg.n_samples; ++i)
      acc.add(delta_fn(ms[i], ws[i]));
    CostEstimate est = acc.estimate(cfg.n_samples);
    DeviationEntry entry{name, step, est.mean, est.std_error,
                         margin_of(est.mean, est.std_error)};
    cert.worst_margin = std::min(cert.worst_margin, entry.margin);
    cert.entries.push_back(std::move(entry));
  };

  for (double s : steps) {
    run("A", s, [&](double m, double w) {
      return encoder_cost(pair.A + s, pair.C, m, w) -
             encoder_cost(pair.A, pair.C, m, w);
    });
    run("C", s, [&](double m, double w) {
      return encoder_cost(pair.A, pair.C + s, m, w) -
             encoder_cost(pair.A, pair.C, m, w);
    });
    run("K", s, [&](double m, double w) {
      return decoder_cost(pair.K + s, pair.L, m, w) -
             decoder_cost(pair.K, pair.L, m, w);
    });
    run("L", s, [&](double m, double w) {
      return decoder_cost(pair.K, pair.L + s, m, w) -
             decoder_cost(pair.K, pair.L, m, w);
    });
  }
  cert.pass = cert.worst_margin >= -3.0;
  return cert;
}

DeviationCertificate deviation_certify(const AffinePairMatrix& pair,
                                       const MatrixGameSpec& spec,
                                       const SimConfig& cfg,
                                       const std::vector<double>& steps) {
  spec.validate();
  check_certify_config(cfg);
  check_steps(steps);
  int n = spec.dimension();
  CounterRng rng(cfg.seed);
  Eigen::MatrixXd chol_m = spec.source_cov.llt().matrixL();
  Eigen::MatrixXd chol_w = spec.noise_cov.llt().matrixL();

  // Per-sample cache: source, channel output, decoder input/output under
  // the base pair. Perturbations touch only incremental terms.
  Eigen::MatrixXd ms(n, cfg.n_samples), ys(n, cfg.n_samples),
      us(n, cfg.n_samples), xs(n, cfg.n_samples);
  Eigen::VectorXd z(n);
  for (std::int64_t i = 0; i < cfg.n_samples; ++i) {
    std::uint64_t c = base_counter(cfg, i);
    double sign = mirrored(cfg, i) ? -1.0 : 1.0;
    for (int k = 0; k < n; ++k)
      z(k) = sign * rng.normal(kSourceStream, c * n + k);
    ms.col(i) = chol_m * z;
    for (int k = 0; k < n; ++k)
      z(k) = sign * rng.normal(kNoiseStream, c * n + k);
    xs.col(i) = pair.A * ms.col(i) + pair.C;
    ys.col(i) = xs.col(i) + chol_w * z;
    us.col(i) = pair.K * ys.col(i) + pair.L;
  }

  DeviationCertificate cert;
  cert.worst_margin = kInf;
  auto run = [&](const std::string& name, double step, auto&& delta_fn) {
    Accumulator acc;
    for (std::int64_t i = 0; i < cfg.n_samples; ++i) acc.add(delta_fn(i));
    CostEstimate est = acc.estimate(cfg.n_samples);
    DeviationEntry entry{name, step, est.mean, est.std_error,
                         margin_of(est.mean, est.std_error)};
    cert.worst_margin = std::min(cert.worst_margin, entry.margin);
    cert.entries.push_back(std::move(entry));
  };

  auto coef_name = [](const char* base, int i, int j) {
    std::ostringstream name;
    name << base << "(" << i;
    if (j >= 0) name << "," << j;
    name << ")";
    return name.str();
  };

  for (double s : steps) {
    // Encoder slope A(i,j): x gains s*m_j on row i, u gains s*m_j*K.col(i).
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        run(coef_name("A", i, j), s, [&, i, j](std::int64_t t) {
          double bump = s * ms(j, t);
          Eigen::VectorXd u_p = us.col(t) + bump * pair.K.col(i);
          double ce_base =
              (ms.col(t) - us.col(t) - spec.bias).squaredNorm() +
              spec.lambda * xs.col(t).squaredNorm();
          Eigen::VectorXd x_p = xs.col(t);
          x_p(i) += bump;
          double ce_pert = (ms.col(t) - u_p - spec.bias).squaredNorm() +
                           spec.lambda * x_p.squaredNorm();
          return ce_pert - ce_base;
        });
      }
      // Encoder intercept C(i).
      run(coef_name("C", i, -1), s, [&, i](std::int64_t t) {
        Eigen::VectorXd u_p = us.col(t) + s * pair.K.col(i);
        double ce_base = (ms.col(t) - us.col(t) - spec.bias).squaredNorm() +
                         spec.lambda * xs.col(t).squaredNorm();
        Eigen::VectorXd x_p = xs.col(t);
        x_p(i) += s;
        double ce_pert = (ms.col(t) - u_p - spec.bias).squaredNorm() +
                         spec.lambda * x_p.squaredNorm();
        return ce_pert - ce_base;
      });
    }
    // Decoder slope K(i,j) and intercept L(i): u_i shifts only.
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        run(coef_name("K", i, j), s, [&, i, j](std::int64_t t) {
          double e_base = ms(i, t) - us(i, t);
          double e_pert = e_base - s * ys(j, t);
          return e_pert * e_pert - e_base * e_base;
        });
      }
      run(coef_name("L", i, -1), s, [&, i](std::int64_t t) {
        double e_base = ms(i, t) - us(i, t);
        double e_pert = e_base - s;
        return e_pert * e_pert - e_base * e_base;
      });
    }
  }
  cert.pass = cert.worst_margin >= -3.0;
  return cert;
}

}  // namespace siggame
