#include "siggame/source_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "siggame/errors.hpp"

namespace siggame {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double std_normal_pdf(double z) {
  if (std::isinf(z)) return 0.0;
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// Mass of the standard normal on [alpha, beta], differenced in whichever
// tail keeps erfc arguments positive so far-tail bins do not cancel.
double std_normal_mass(double alpha, double beta) {
  auto upper = [](double z) {  // P(Z >= z)
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
  };
  if (alpha >= 0) return upper(alpha) - upper(beta);
  if (beta <= 0) return upper(-beta) - upper(-alpha);
  return std_normal_cdf(beta) - std_normal_cdf(alpha);
}

}  // namespace

SourceModel SourceModel::uniform(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("uniform source requires finite lo < hi");
  return SourceModel(SourceKind::Uniform, lo, hi);
}

SourceModel SourceModel::gaussian(double mean, double variance) {
  if (!(variance > 0) || !std::isfinite(mean) || !std::isfinite(variance))
    throw std::invalid_argument("gaussian source requires variance > 0");
  return SourceModel(SourceKind::Gaussian, mean, variance);
}

SourceModel SourceModel::exponential(double rate) {
  if (!(rate > 0) || !std::isfinite(rate))
    throw std::invalid_argument("exponential source requires rate > 0");
  return SourceModel(SourceKind::Exponential, rate, 0.0);
}

double SourceModel::support_lo() const {
  switch (kind_) {
    case SourceKind::Uniform: return a_;
    case SourceKind::Gaussian: return -kInf;
    case SourceKind::Exponential: return 0.0;
  }
  return 0.0;
}

double SourceModel::support_hi() const {
  switch (kind_) {
    case SourceKind::Uniform: return b_;
    case SourceKind::Gaussian: return kInf;
    case SourceKind::Exponential: return kInf;
  }
  return 0.0;
}

double SourceModel::mean() const {
  switch (kind_) {
    case SourceKind::Uniform: return 0.5 * (a_ + b_);
    case SourceKind::Gaussian: return a_;
    case SourceKind::Exponential: return 1.0 / a_;
  }
  return 0.0;
}

double SourceModel::variance() const {
  switch (kind_) {
    case SourceKind::Uniform: return (b_ - a_) * (b_ - a_) / 12.0;
    case SourceKind::Gaussian: return b_;
    case SourceKind::Exponential: return 1.0 / (a_ * a_);
  }
  return 0.0;
}

double SourceModel::second_moment() const {
  double mu = mean();
  return variance() + mu * mu;
}

double SourceModel::pdf(double x) const {
  switch (kind_) {
    case SourceKind::Uniform:
      return (x >= a_ && x <= b_) ? 1.0 / (b_ - a_) : 0.0;
    case SourceKind::Gaussian: {
      double sigma = std::sqrt(b_);
      return std_normal_pdf((x - a_) / sigma) / sigma;
    }
    case SourceKind::Exponential:
      return x >= 0 ? a_ * std::exp(-a_ * x) : 0.0;
  }
  return 0.0;
}

double SourceModel::cdf(double x) const {
  switch (kind_) {
    case SourceKind::Uniform:
      if (x <= a_) return 0.0;
      if (x >= b_) return 1.0;
      return (x - a_) / (b_ - a_);
    case SourceKind::Gaussian:
      if (x == kInf) return 1.0;
      if (x == -kInf) return 0.0;
      return std_normal_cdf((x - a_) / std::sqrt(b_));
    case SourceKind::Exponential:
      if (x <= 0) return 0.0;
      return -std::expm1(-a_ * x);
  }
  return 0.0;
}

double SourceModel::interval_mass(double lo, double hi) const {
  if (lo > hi) throw InvalidIntervalError("interval_mass: lo > hi");
  double a = std::max(lo, support_lo());
  double b = std::min(hi, support_hi());
  if (a > b) return 0.0;
  double m = 0.0;
  switch (kind_) {
    case SourceKind::Uniform:
      m = cdf(b) - cdf(a);
      break;
    case SourceKind::Gaussian: {
      double sigma = std::sqrt(b_);
      m = std_normal_mass((a - a_) / sigma, (b - a_) / sigma);
      break;
    }
    case SourceKind::Exponential:
      // e^{-ra}(1 - e^{-r(b-a)}); stays accurate deep in the tail.
      if (b == kInf) {
        m = std::exp(-a_ * a);
      } else {
        m = std::exp(-a_ * a) * -std::expm1(-a_ * (b - a));
      }
      break;
  }
  return std::clamp(m, 0.0, 1.0);
}

double SourceModel::interval_mean(double lo, double hi) const {
  if (lo > hi) throw InvalidIntervalError("interval_mean: lo > hi");
  if (!(interval_mass(lo, hi) > 0))
    throw EmptyBinError("interval_mean: zero-mass interval");
  double a = std::max(lo, support_lo());
  double b = std::min(hi, support_hi());

  switch (kind_) {
    case SourceKind::Uniform:
      return 0.5 * (a + b);
    case SourceKind::Gaussian: {
      double sigma = std::sqrt(b_);
      double alpha = (a - a_) / sigma;
      double beta = (b - a_) / sigma;
      // Thin bins cancel in the Mills-ratio formula; a midpoint-rule
      // quadrature of the nearly constant density is exact there.
      if (std::isfinite(alpha) && std::isfinite(beta) &&
          (beta - alpha) < 1e-8) {
        return 0.5 * (a + b);
      }
      double z = std_normal_mass(alpha, beta);
      return a_ + sigma * (std_normal_pdf(alpha) - std_normal_pdf(beta)) / z;
    }
    case SourceKind::Exponential: {
      // E[m | a<=m<=b] = a + 1/rate - w*exp(-rate*w)/(1-exp(-rate*w)),
      // w = b-a, written with expm1 to survive thin bins.
      if (b == kInf) return a + 1.0 / a_;
      double w = b - a;
      double denom = -std::expm1(-a_ * w);
      if (!(denom > 0)) return 0.5 * (a + b);
      return a + 1.0 / a_ - w * std::exp(-a_ * w) / denom;
    }
  }
  return 0.0;
}

double SourceModel::interval_second_moment(double lo, double hi) const {
  if (lo > hi) throw InvalidIntervalError("interval_second_moment: lo > hi");
  if (!(interval_mass(lo, hi) > 0))
    throw EmptyBinError("interval_second_moment: zero-mass interval");
  double a = std::max(lo, support_lo());
  double b = std::min(hi, support_hi());

  switch (kind_) {
    case SourceKind::Uniform:
      return (b * b + a * b + a * a) / 3.0;
    case SourceKind::Gaussian: {
      double sigma = std::sqrt(b_);
      double alpha = (a - a_) / sigma;
      double beta = (b - a_) / sigma;
      if (std::isfinite(alpha) && std::isfinite(beta) &&
          (beta - alpha) < 1e-8) {
        double mid = 0.5 * (a + b);
        return mid * mid;
      }
      double z = std_normal_mass(alpha, beta);
      // Truncated standard normal: E[Z] and E[Z^2] via phi endpoints;
      // terms like beta*phi(beta) vanish at infinite endpoints.
      auto zphi = [](double t) {
        return std::isinf(t) ? 0.0 : t * std_normal_pdf(t);
      };
      double ez = (std_normal_pdf(alpha) - std_normal_pdf(beta)) / z;
      double ez2 = 1.0 + (zphi(alpha) - zphi(beta)) / z;
      return a_ * a_ + 2.0 * a_ * sigma * ez + b_ * ez2;
    }
    case SourceKind::Exponential: {
      // Antiderivative of x^2 rate e^{-rate x}: -(x^2 + 2x/r + 2/r^2)e^{-rate x}.
      auto anti = [this](double x) {
        if (x == kInf) return 0.0;
        return -(x * x + 2.0 * x / a_ + 2.0 / (a_ * a_)) * std::exp(-a_ * x);
      };
      double denom = interval_mass(a, b);
      if (!(denom > 0)) {
        double mid = 0.5 * (a + b);
        return mid * mid;
      }
      return (anti(b) - anti(a)) / denom;
    }
  }
  return 0.0;
}

double sample(const SourceModel& src, RandomStream& stream) {
  switch (src.kind()) {
    case SourceKind::Uniform:
      return src.support_lo() +
             (src.support_hi() - src.support_lo()) * stream.uniform01();
    case SourceKind::Gaussian:
      return src.mean() + std::sqrt(src.variance()) * stream.normal();
    case SourceKind::Exponential:
      return -std::log(stream.uniform01()) * src.mean();
  }
  return 0.0;
}

double sample_at(const SourceModel& src, const CounterRng& rng,
                 std::uint64_t stream, std::uint64_t counter, bool mirror) {
  switch (src.kind()) {
    case SourceKind::Uniform: {
      double u = rng.uniform01(stream, counter);
      if (mirror) u = 1.0 - u;
      return src.support_lo() + (src.support_hi() - src.support_lo()) * u;
    }
    case SourceKind::Gaussian: {
      double z = rng.normal(stream, counter);
      if (mirror) z = -z;
      return src.mean() + std::sqrt(src.variance()) * z;
    }
    case SourceKind::Exponential: {
      double u = rng.uniform01(stream, counter);
      double log_u = mirror ? std::log1p(-u) : std::log(u);
      return -log_u * src.mean();
    }
  }
  return 0.0;
}

}  // namespace siggame
