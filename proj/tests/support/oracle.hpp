#pragma once

// Reference answers for tiny instances, obtained by walking the entire plan
// lattice. Everything in here recomputes the stock recursions from scratch;
// none of it calls into the production formulation, solver or evaluation
// paths, so agreement with them is meaningful evidence.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "stockflow/instance.hpp"
#include "stockflow/rational.hpp"

namespace stockflow::testsupport {

// A fully fixed plan over the lattice domain.
//   x[t-1][(i-1)*n + (j-1)]  shipments, zero wherever (i,j) is not usable
//   s[slot][m]               shares per active (region, period) slot in the
//                            order oracle_share_slots reports; slots cover
//                            exactly the (k,t) cells with positive extra stock
struct TinyPlan {
  std::vector<std::vector<std::int64_t>> x;
  std::vector<std::vector<std::int64_t>> s;
};

// Active sharing slots of an instance in enumeration order (period asc, then
// region index asc). Member order inside a slot follows the region listing.
struct ShareSlot {
  int region = 0;  // index into network.regions
  int period = 0;  // 1-based
  std::int64_t amount = 0;
};
std::vector<ShareSlot> oracle_share_slots(const Instance& inst);

// Criterion values of one feasible plan: the four plain families under the
// instance probabilities, and per family the value restricted to each single
// scenario with probability one (the regret building block).
struct TinyScore {
  std::array<BigRat, 4> full;
  std::array<std::vector<BigRat>, 4> single;
};

// Recomputes S, R, D, v, H, NCD for the plan and checks every operating rule.
// Returns nothing when the plan is infeasible.
std::optional<TinyScore> oracle_score(const Instance& inst, const TinyPlan& plan);

struct OracleResult {
  bool completed = false;  // false: budget exhausted, ignore the rest
  long long feasible_plans = 0;
  std::array<std::optional<BigRat>, 4> plain;  // min over jointly feasible plans
  // Perfect-information benchmark per family and scenario: the optimum of the
  // problem restricted to that scenario alone, feasibility included. Empty
  // when some scenario admits no plan at all.
  std::array<std::vector<BigRat>, 4> baseline;
  std::array<std::optional<BigRat>, 4> regret;  // min over plans of max regret
};

// Exhaustive minima over every feasible plan for all eight criteria. The
// budget caps enumeration steps; callers skip instances that blow past it.
OracleResult oracle_solve(const Instance& inst, long long step_budget);

}  // namespace stockflow::testsupport
