#pragma once

namespace siggame {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace siggame
