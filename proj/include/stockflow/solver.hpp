#pragma once

#include <cstdint>
#include <vector>

#include "stockflow/milp.hpp"

namespace stockflow::milp {

enum class NumericMode { Rational, Floating };

struct SolveOptions {
  NumericMode mode = NumericMode::Rational;
  std::int64_t node_limit = 1'000'000;
  double time_limit_s = 3600.0;
  // Candidate feasible points (full variable vectors). Each is checked
  // exactly; valid ones seed the incumbent before the search starts.
  std::vector<std::vector<Rat64>> hints;
};

// Branch-and-bound over the bounded-variable simplex. Rational mode is exact
// end to end; it falls back to big-integer rationals automatically if 64-bit
// components overflow. Floating mode solves relaxations in double precision
// but every reported incumbent is verified and completed exactly, so returned
// values are always exactly feasible.
Solution solve(const Model& model, const SolveOptions& options = {});

}  // namespace stockflow::milp
