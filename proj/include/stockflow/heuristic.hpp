#pragma once

// Rolling-horizon decomposition. The horizon is split into consecutive
// subperiods; each subproblem optimizes its own stretch plus the single
// boundary period after it, decisions up to the boundary are frozen, and the
// boundary state is carried into the next subproblem as synthetic initial
// stock. The glued plan is feasible on the full horizon whenever every
// subproblem solves, and its exact recomputed value is an upper bound on the
// full-horizon optimum.

#include <cstdint>
#include <string>
#include <vector>

#include "stockflow/evaluation.hpp"
#include "stockflow/formulation.hpp"
#include "stockflow/instance.hpp"
#include "stockflow/milp.hpp"
#include "stockflow/solver.hpp"

namespace stockflow {

// Strictly increasing breakpoints with breakpoints.front() == 1 and
// breakpoints.back() == horizon + 1. Subperiod k (1-based) owns the periods
// [breakpoints[k-1], breakpoints[k]); its sub-model additionally sees the
// boundary period breakpoints[k] when that still lies inside the horizon.
struct HorizonSplit {
  std::vector<int> breakpoints;

  int parts() const { return (int)breakpoints.size() - 1; }
  int first(int k) const { return breakpoints[(size_t)(k - 1)]; }  // k 1-based
  int past_last(int k) const { return breakpoints[(size_t)k]; }
};

// Near-equal subperiod lengths, earlier subperiods taking the remainder.
// Rejects K outside [1, q].
HorizonSplit make_even_split(int q, int K);

struct SubproblemDiag {
  int index = 0;          // 1-based subproblem number
  int first_period = 0;   // global window the sub-model optimized
  int last_period = 0;
  int frozen_through = 0;  // decisions kept up to this global period
  milp::SolveStatus status = milp::SolveStatus::Optimal;
  bool hit_limit = false;  // stopped at a node or time limit, incumbent used
  BigRat objective{};      // sub-model value of the solution that was frozen
  double wall_seconds = 0;
  std::vector<std::int64_t> carry_in;  // synthetic starting stock per node
};

struct RollingResult {
  Plan plan;
  std::vector<SubproblemDiag> subproblems;
};

// Runs the decomposition under any of the eight criteria; regret variants
// compute their perfect-information benchmarks per subproblem. Throws
// std::invalid_argument for a split that does not match the horizon, and
// milp::SolverError naming the failing subproblem when one admits no plan or
// yields no incumbent within the limits. A subproblem stopped by a limit
// with an incumbent in hand is used as is and flagged in the diagnostics.
RollingResult rolling_horizon_solve(const Instance& inst, const Objective& obj,
                                    const HorizonSplit& split,
                                    const milp::SolveOptions& limits = {});

// Per-subproblem record (JSON): window, status, objective, wall time and
// carry-over vector. Deterministic field order.
std::string diagnostics_json(const RollingResult& result);

}  // namespace stockflow
