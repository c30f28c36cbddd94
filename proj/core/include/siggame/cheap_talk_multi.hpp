#pragma once

#include <optional>
#include <vector>

#include "siggame/cheap_talk.hpp"

namespace siggame {

// Multi-dimensional cheap talk with independent coordinate sources and
// squared-norm costs; the cost separates across coordinates.
struct MultiCheapTalkSpec {
  std::vector<SourceModel> sources;
  std::vector<double> bias;

  int dimension() const { return static_cast<int>(sources.size()); }
  void validate() const;
};

// Per-coordinate policy: either a scalar quantizer or full revelation.
// Full revelation is represented symbolically (exact zero distortion) and
// is an equilibrium only on coordinates with zero bias.
struct ProductPolicy {
  struct Coordinate {
    bool fully_informative = false;
    QuantizerPolicy quantizer;  // used when !fully_informative
  };
  std::vector<Coordinate> coordinates;
};

// Bin request per coordinate: a bin count, or nullopt for full revelation.
using BinRequest = std::optional<int>;

// Builds the product equilibrium coordinate-by-coordinate via the scalar
// solver. Returns nullopt when some quantized coordinate has no equilibrium
// with the requested bin count. Requesting full revelation on a biased
// coordinate throws ValidationError.
std::optional<ProductPolicy> build_product_equilibrium(
    const MultiCheapTalkSpec& spec, const std::vector<BinRequest>& bins);

// Verifies decoder conditional means per coordinate and the encoder
// deviation test on the product grid (assigned action tuple optimal over
// the product action set within slack -1e-10). grid_per_dim >= 100.
VerificationResult verify_multi(const MultiCheapTalkSpec& spec,
                                const ProductPolicy& policy,
                                int grid_per_dim);

CheapTalkCosts costs(const MultiCheapTalkSpec& spec,
                     const ProductPolicy& policy);

// Stackelberg solution: full revelation in every coordinate, J_d = 0,
// J_e = |b|^2.
EquilibriumReport stackelberg_multi(const MultiCheapTalkSpec& spec);

// User-supplied two-dimensional rectangular partition with one action
// point per cell; lets non-product equilibria be checked even though no
// constructor for them is provided.
struct PartitionCell2D {
  double x_lo, x_hi, y_lo, y_hi;
  double action_x, action_y;
};

// Verifies a 2D cell partition: cells must tile the support, actions must
// equal cell conditional means, and every grid point must prefer its own
// cell's action. Requires dimension() == 2.
VerificationResult verify_partition_2d(
    const MultiCheapTalkSpec& spec, const std::vector<PartitionCell2D>& cells,
    int grid_per_dim);

}  // namespace siggame
