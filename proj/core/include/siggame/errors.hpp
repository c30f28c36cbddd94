#pragma once

#include <stdexcept>
#include <string>

namespace siggame {

// Interval with lo > hi.
class InvalidIntervalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Conditional statistics requested over an interval of zero probability mass.
class EmptyBinError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solver hit its iteration cap without converging. Distinct from a
// well-posed "no equilibrium of this class exists" outcome, which is
// reported through the return value, never through this exception.
class SolverFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed policy or spec handed to a verifier/solver.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A Monte Carlo run saw a non-finite policy output; message carries the input.
class SimulationAbortError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace siggame
