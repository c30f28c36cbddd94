#pragma once

#include <array>

#include "siggame/signaling_multi.hpp"

namespace siggame {

// Built-in 4-dimensional scenario whose best-response map has two
// sign-inequivalent nonzero fixed-point classes with different
// absolute-valued entries; used by the regression suite and the
// `reference-4d` CLI command.
MatrixGameSpec reference_case_4d();

// The two known fixed-point slopes of the scenario, rounded to four
// decimals. Each satisfies |T(A) - A|_F < 5e-3 at that precision; refining
// them with solve_fixed_point recovers the exact classes.
std::array<Eigen::MatrixXd, 2> reference_fixed_points_4d();

}  // namespace siggame
