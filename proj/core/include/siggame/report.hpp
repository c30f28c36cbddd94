#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace siggame {

enum class EquilibriumClass {
  InformativeAffine,
  NonInformative,
  FullyInformative,
  Quantized,
  Stackelberg,
  Team,
};

inline const char* to_string(EquilibriumClass cls) {
  switch (cls) {
    case EquilibriumClass::InformativeAffine: return "informative-affine";
    case EquilibriumClass::NonInformative: return "non-informative";
    case EquilibriumClass::FullyInformative: return "fully-informative";
    case EquilibriumClass::Quantized: return "quantized";
    case EquilibriumClass::Stackelberg: return "stackelberg";
    case EquilibriumClass::Team: return "team";
  }
  return "unknown";
}

// Affine encoder x = A m + C with affine decoder u = K y + L.
struct AffinePairScalar {
  double A = 0.0;
  double C = 0.0;
  double K = 0.0;
  double L = 0.0;
};

struct Diagnostics {
  double fixed_point_residual = std::numeric_limits<double>::quiet_NaN();
  double deviation_margin = std::numeric_limits<double>::quiet_NaN();
};

struct EquilibriumReport {
  EquilibriumClass cls = EquilibriumClass::NonInformative;
  std::optional<AffinePairScalar> policy;
  double encoder_cost = 0.0;
  double decoder_cost = 0.0;
  double total_cost = 0.0;
  Diagnostics diagnostics;
  std::vector<std::string> flags;

  bool has_flag(const std::string& name) const {
    for (const auto& flag : flags)
      if (flag == name) return true;
    return false;
  }
};

inline constexpr const char* kFlagNoAffineInformative = "no-affine-informative";
inline constexpr const char* kFlagBabblingPreferred = "babbling-preferred";
inline constexpr const char* kFlagBabblingCorner = "babbling-corner";

}  // namespace siggame
