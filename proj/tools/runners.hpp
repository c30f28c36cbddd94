#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace siggame::cli {

using nlohmann::json;

// Exit-code contract: 0 solved, 2 no equilibrium of the requested class,
// 1 malformed input or internal failure (thrown; mapped to 1 in main).
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;

struct RunOutcome {
  int exit_code = kExitOk;
  json result;
};

// Dispatches one scenario for `game` with fully-resolved parameters.
// Throws std::exception subclasses on malformed parameters.
RunOutcome run_game(const std::string& game, const json& params,
                    std::optional<std::uint64_t> seed_override);

// Ordered CSV cells for one result; shared by single runs and sweep rows.
std::vector<std::pair<std::string, std::string>> csv_columns(
    const std::string& game, const json& result);

bool known_game(const std::string& game);
const std::vector<std::string>& game_names();

}  // namespace siggame::cli
