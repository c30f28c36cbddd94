#include "siggame/cheap_talk_multi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "siggame/errors.hpp"

namespace siggame {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZeroBiasTol = 1e-12;

// Smallest encoder excess cost over the coordinate grid for one quantized
// coordinate; the squared-norm cost separates, so the product-grid minimum
// is the sum of these per-coordinate minima.
double coordinate_slack(const SourceModel& src, double bias,
                        const QuantizerPolicy& policy, int grid) {
  auto [lo, hi] = scan_range(src);
  double slack = kInf;
  for (int g = 0; g < grid; ++g) {
    double m = lo + (hi - lo) * (g + 0.5) / grid;
    auto assigned = std::upper_bound(policy.boundaries.begin(),
                                     policy.boundaries.end(), m) -
                    policy.boundaries.begin();
    auto cost = [&](double u) {
      double d = m - u - bias;
      return d * d;
    };
    double assigned_cost = cost(policy.actions[assigned]);
    double best = kInf;
    for (double u : policy.actions) best = std::min(best, cost(u));
    slack = std::min(slack, best - assigned_cost);
  }
  return slack;
}

}  // namespace

void MultiCheapTalkSpec::validate() const {
  if (sources.empty())
    throw std::invalid_argument("multi cheap talk spec: dimension >= 1");
  if (bias.size() != sources.size())
    throw std::invalid_argument("multi cheap talk spec: bias size mismatch");
  for (double b : bias) {
    if (!std::isfinite(b))
      throw std::invalid_argument("multi cheap talk spec: bias must be finite");
  }
}

std::optional<ProductPolicy> build_product_equilibrium(
    const MultiCheapTalkSpec& spec, const std::vector<BinRequest>& bins) {
  spec.validate();
  if (bins.size() != spec.sources.size())
    throw std::invalid_argument(
        "build_product_equilibrium: one bin request per coordinate");

  ProductPolicy policy;
  policy.coordinates.resize(spec.dimension());
  for (int d = 0; d < spec.dimension(); ++d) {
    if (!bins[d].has_value()) {
      if (std::abs(spec.bias[d]) > kZeroBiasTol)
        throw ValidationError(
            "build_product_equilibrium: full revelation requested on a "
            "biased coordinate");
      policy.coordinates[d].fully_informative = true;
      continue;
    }
    CheapTalkSpec coord{spec.sources[d], spec.bias[d]};
    auto scalar = solve_quantizer_equilibrium(coord, *bins[d]);
    if (!scalar) return std::nullopt;
    policy.coordinates[d].quantizer = std::move(*scalar);
  }
  return policy;
}

VerificationResult verify_multi(const MultiCheapTalkSpec& spec,
                                const ProductPolicy& policy,
                                int grid_per_dim) {
  spec.validate();
  if (grid_per_dim < 100)
    throw std::invalid_argument("verify_multi: grid_per_dim >= 100 required");
  if (policy.coordinates.size() != spec.sources.size())
    throw ValidationError("verify_multi: policy dimension mismatch");

  VerificationResult result;
  result.encoder_slack = 0.0;

  for (int d = 0; d < spec.dimension(); ++d) {
    const auto& coord = policy.coordinates[d];
    if (coord.fully_informative) {
      if (std::abs(spec.bias[d]) > kZeroBiasTol) {
        result.failure = "full revelation on a biased coordinate";
        return result;
      }
      continue;  // exact decoder match, zero encoder slack
    }
    coord.quantizer.validate();
    for (int i = 0; i < coord.quantizer.bins(); ++i) {
      auto [lo, hi] = coord.quantizer.bin(i, spec.sources[d]);
      double dev = std::abs(coord.quantizer.actions[i] -
                            spec.sources[d].interval_mean(lo, hi));
      result.decoder_deviation = std::max(result.decoder_deviation, dev);
    }
    result.encoder_slack += coordinate_slack(spec.sources[d], spec.bias[d],
                                             coord.quantizer, grid_per_dim);
  }

  if (result.decoder_deviation > 1e-8) {
    result.failure = "decoder action deviates from bin conditional mean";
    return result;
  }
  if (result.encoder_slack < -1e-10) {
    result.failure = "encoder prefers another action tuple";
    return result;
  }
  result.pass = true;
  return result;
}

CheapTalkCosts costs(const MultiCheapTalkSpec& spec,
                     const ProductPolicy& policy) {
  spec.validate();
  if (policy.coordinates.size() != spec.sources.size())
    throw ValidationError("costs: policy dimension mismatch");
  CheapTalkCosts total;
  for (int d = 0; d < spec.dimension(); ++d) {
    const auto& coord = policy.coordinates[d];
    if (coord.fully_informative) {
      total.encoder += spec.bias[d] * spec.bias[d];
      continue;
    }
    CheapTalkSpec scalar_spec{spec.sources[d], spec.bias[d]};
    CheapTalkCosts c = costs(scalar_spec, coord.quantizer);
    total.encoder += c.encoder;
    total.decoder += c.decoder;
  }
  return total;
}

EquilibriumReport stackelberg_multi(const MultiCheapTalkSpec& spec) {
  spec.validate();
  double b2 = 0.0;
  for (double b : spec.bias) b2 += b * b;
  EquilibriumReport report;
  report.cls = EquilibriumClass::FullyInformative;
  report.decoder_cost = 0.0;
  report.encoder_cost = b2;
  report.total_cost = b2;
  return report;
}

VerificationResult verify_partition_2d(
    const MultiCheapTalkSpec& spec, const std::vector<PartitionCell2D>& cells,
    int grid_per_dim) {
  spec.validate();
  if (spec.dimension() != 2)
    throw std::invalid_argument("verify_partition_2d: two dimensions required");
  if (grid_per_dim < 100)
    throw std::invalid_argument(
        "verify_partition_2d: grid_per_dim >= 100 required");
  if (cells.empty()) throw ValidationError("verify_partition_2d: no cells");

  VerificationResult result;
  result.encoder_slack = kInf;

  // Decoder: each cell's action must be the conditional mean of the cell
  // (coordinates are independent, so per-axis truncated means suffice).
  for (const auto& cell : cells) {
    if (!(cell.x_lo < cell.x_hi) || !(cell.y_lo < cell.y_hi))
      throw ValidationError("verify_partition_2d: degenerate cell");
    double mass = spec.sources[0].interval_mass(cell.x_lo, cell.x_hi) *
                  spec.sources[1].interval_mass(cell.y_lo, cell.y_hi);
    if (!(mass > 0)) continue;
    double mx = spec.sources[0].interval_mean(cell.x_lo, cell.x_hi);
    double my = spec.sources[1].interval_mean(cell.y_lo, cell.y_hi);
    result.decoder_deviation =
        std::max({result.decoder_deviation, std::abs(cell.action_x - mx),
                  std::abs(cell.action_y - my)});
  }
  if (result.decoder_deviation > 1e-8) {
    result.failure = "cell action deviates from cell conditional mean";
    return result;
  }

  auto [x_lo, x_hi] = scan_range(spec.sources[0]);
  auto [y_lo, y_hi] = scan_range(spec.sources[1]);
  for (int gx = 0; gx < grid_per_dim; ++gx) {
    double mx = x_lo + (x_hi - x_lo) * (gx + 0.5) / grid_per_dim;
    for (int gy = 0; gy < grid_per_dim; ++gy) {
      double my = y_lo + (y_hi - y_lo) * (gy + 0.5) / grid_per_dim;

      // Half-open containment so shared edges do not count as overlap.
      const PartitionCell2D* assigned = nullptr;
      for (const auto& cell : cells) {
        if (mx >= cell.x_lo && mx < cell.x_hi && my >= cell.y_lo &&
            my < cell.y_hi) {
          assigned = &cell;
          break;
        }
      }
      if (assigned == nullptr) {
        result.failure = "partition does not cover the support";
        return result;
      }

      auto cost = [&](const PartitionCell2D& cell) {
        double dx = mx - cell.action_x - spec.bias[0];
        double dy = my - cell.action_y - spec.bias[1];
        return dx * dx + dy * dy;
      };
      double assigned_cost = cost(*assigned);
      double best = kInf;
      for (const auto& cell : cells) best = std::min(best, cost(cell));
      result.encoder_slack = std::min(result.encoder_slack,
                                      best - assigned_cost);
    }
  }
  if (result.encoder_slack < -1e-10) {
    result.failure = "encoder prefers another cell's action";
    return result;
  }
  result.pass = true;
  return result;
}

}  // namespace siggame
