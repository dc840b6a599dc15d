#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stockflow/network.hpp"
#include "stockflow/rational.hpp"

namespace stockflow {

// Per-node capacities, all indexed by node id - 1. An absent optional means
// the corresponding limit is unbounded.
struct CapacityProfile {
  std::vector<std::int64_t> initial_stock;               // s0 >= 0
  std::vector<std::optional<std::int64_t>> max_deliveries;  // per-period delivery count cap
  std::vector<Rat64> share_fraction;                     // in [0, 1]
  std::vector<std::int64_t> max_shipment;                // units per delivery, >= 1
  std::vector<std::optional<std::int64_t>> storage_cap;
};

// amount[k][t-1]: units of extra stock entering sharing region k in period t.
struct ExtraStockSchedule {
  std::vector<std::vector<std::int64_t>> amount;
};

struct ScenarioSet {
  std::vector<std::string> names;
  std::vector<Rat64> prob;  // must sum to exactly 1
  // demand[w][i-1][t-1]
  std::vector<std::vector<std::vector<std::int64_t>>> demand;

  int count() const { return (int)names.size(); }
};

// Whether extra stock must be placed in full in its arrival period or may be
// partially withheld.
enum class ShareMode { Exact, AtMost };

struct Instance {
  DistributionNetwork network;
  ReachabilityTable reach;
  int horizon = 0;  // periods are 1..horizon
  CapacityProfile profile;
  ExtraStockSchedule extra;
  ScenarioSet scenarios;
  // Deliveries already under way when the planning window opens:
  // receipts[i-1][t-1] units appear at node i in period t before any
  // decision. Empty means none.
  std::vector<std::vector<std::int64_t>> receipts;
  ShareMode share_mode = ShareMode::Exact;
  // Nodes allowed to forward stock in the period right after receiving some.
  std::vector<int> relay_exempt;

  int num_nodes() const { return network.num_nodes(); }
};

std::vector<Finding> validate_instance(const Instance& inst);

// Daily active demand from cumulative admission counts: new admissions are
// max(0, day-over-day difference) and each admission stays active for
// `stay_length` periods. Indexing is [node][period-1].
std::vector<std::vector<std::int64_t>> estimate_daily_demand_from_cumulative(
    const std::vector<std::vector<std::int64_t>>& cumulative, int stay_length);

// Largest-remainder apportionment of `total` units proportional to weights.
// Remainder ties go to the larger weight, then to the earlier entry. The
// result always sums to exactly `total`.
std::vector<std::int64_t> split_extra_stock_by_population(std::int64_t total,
                                                          const std::vector<Rat64>& weights);

enum class DemandRounding { Nearest, Floor, Ceil };

struct ScenarioGenConfig {
  std::uint64_t seed = 0;
  Rat64 province_range_bound{1, 2};
  DemandRounding rounding = DemandRounding::Nearest;
  // Support size of the replacement draw for nonpositive perturbed demands:
  // 1 means always 1, 2 means uniform on {1, 2}.
  int zero_fix_support = 2;
  // Override for the default uniform 1/3 probabilities; must have size 3
  // and sum to 1 when present.
  std::optional<std::vector<Rat64>> probabilities;
};

// Builds the three-scenario set {Real, Pessimistic, Optimistic} from real
// demands. Per province two rate bounds are drawn, per hospital its own
// rates within those bounds; pessimistic demand is (1 + rate) * d and
// optimistic (1 - rate) * d, rounded, with nonpositive results replaced by a
// small random demand. Logistic-center nodes keep their real demand in every
// scenario. Fixed seed implies bit-identical output.
ScenarioSet generate_scenarios(const std::vector<std::vector<std::int64_t>>& real_demand,
                               const DistributionNetwork& network,
                               const ScenarioGenConfig& cfg);

}  // namespace stockflow
