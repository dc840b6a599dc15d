#pragma once

// Solver-independent plan accounting. Everything here is recomputed from the
// shipment and placement amounts alone, by the same recursions the model
// linearizes; none of the solver's auxiliary columns are trusted. That makes
// this module the referee for the optimizer: a solved model's objective must
// agree exactly with the evaluation of its decoded plan.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "stockflow/formulation.hpp"
#include "stockflow/instance.hpp"
#include "stockflow/milp.hpp"
#include "stockflow/solver.hpp"

namespace stockflow {

// A concrete reallocation decision: shipment amounts per usable pair and
// period, and extra-stock placements per node, sharing region and period.
// Keys are (i, j, t) with nodes and periods 1-based, and (i, k, t) with k the
// 1-based region number. Zero entries are allowed but carry no meaning; the
// on/off indicator of the model is derived, a pair ships iff its amount is
// positive.
struct Plan {
  std::map<std::tuple<int, int, int>, std::int64_t> x;
  std::map<std::tuple<int, int, int>, std::int64_t> s;
};

// Reads the shipment and placement columns out of a solution vector laid out
// by the given index. Only positive amounts are kept. Throws std::logic_error
// if any such column is fractional.
Plan decode_plan(const VariableIndex& index, const std::vector<Rat64>& values);

// One broken rule. `unit` is the sending or holding node, except for
// placement quotas where it is the region number. `scenario` is 0-based and
// -1 for rules that do not depend on the scenario. `slack` is how far past
// the limit the plan is (for equality quotas, the signed difference).
struct Violation {
  std::string constraint;  // "C1".."C6"
  int unit = 0;
  int period = 0;
  int scenario = -1;
  Rat64 slack{};
  std::string detail;
};

struct EvaluationReport {
  int n = 0;
  int q = 0;
  int nw = 0;

  // Cumulative positions, scenario-free, indexed [i-1][t-1]: stock on site
  // including placements, units received (scheduled receipts plus shipment
  // arrivals), units sent away.
  std::vector<std::vector<std::int64_t>> stock;
  std::vector<std::vector<std::int64_t>> received;
  std::vector<std::vector<std::int64_t>> delivered;

  // Demand-dependent cells, indexed [w][i-1][t-1]. `margin` is what is on
  // hand before this period's sendings minus active demand (may be
  // negative), `excess` its positive part, `shortfall_pos` the positive part
  // of the uncovered demand after this period's sendings.
  std::vector<std::vector<std::vector<std::int64_t>>> margin;
  std::vector<std::vector<std::vector<std::int64_t>>> excess;
  std::vector<std::vector<std::vector<std::int64_t>>> shortfall;
  std::vector<std::vector<std::vector<std::int64_t>>> shortfall_pos;

  // Aggregates for reporting: per scenario and period the total uncovered
  // demand and total excess, per period the physical on-hand total after
  // sendings (scenario-free), per region and period the placed amount, per
  // period the total shipped.
  std::vector<std::vector<std::int64_t>> total_shortfall_pos;  // [w][t-1]
  std::vector<std::vector<std::int64_t>> total_excess;         // [w][t-1]
  std::vector<std::int64_t> total_on_hand;                     // [t-1]
  std::vector<std::vector<std::int64_t>> placed;               // [k][t-1]
  std::vector<std::int64_t> redistributed;                     // [t-1]

  // Criterion values of this plan, indexed by Family declaration order: the
  // probability-weighted value of each family, and each family's value under
  // every single scenario alone. The regret variants are derived from
  // `single` and external perfect-information benchmarks via regret_value;
  // they cannot be computed from the plan by itself. The group family is 0
  // when no fairness partition is defined.
  std::array<BigRat, 4> plain{};
  std::array<std::vector<BigRat>, 4> single{};

  std::vector<Violation> violations;
  bool feasible() const { return violations.empty(); }
};

// Recomputes every position, criterion value and rule check for a fixed plan.
// Never throws on an infeasible plan; that is what `violations` is for.
// Throws std::invalid_argument only for malformed input: negative amounts,
// unknown pairs or regions, placements outside the region's member set, or
// periods outside the horizon.
EvaluationReport evaluate_plan(const Instance& inst, const Plan& plan);

// max over scenarios of (this plan's single-scenario value minus that
// scenario's benchmark). Baselines are indexed like the instance's scenario
// list; sizes must match.
BigRat regret_value(const EvaluationReport& report, Family family,
                    const std::vector<Rat64>& baselines);

// Solves the instance with every shipment pinned to zero (placements stay
// free) and evaluates the best plan found. `report` and `plan` are meaningful
// only when the solution carries an incumbent.
struct BaselineResult {
  Plan plan;
  EvaluationReport report;
  milp::Solution solution;
};
BaselineResult solve_baseline_no_redistribution(const Instance& inst, const Objective& obj,
                                                const milp::SolveOptions& so = {});

// CSV series shaped for the standard comparison plots: uncovered demand per
// period, stock position per period (the excess measure and the raw on-hand
// measure side by side), units shipped per period, and placed extra stock
// per region and period. Output is byte-deterministic. `without_redist` may
// be null; when present its dimensions and scenario names must match.
struct FigureTables {
  std::string ncd;
  std::string stock;
  std::string redistributed;
  std::string shares;
};
FigureTables emit_figure_tables(const Instance& inst, const EvaluationReport& with_redist,
                                const EvaluationReport* without_redist);

}  // namespace stockflow
