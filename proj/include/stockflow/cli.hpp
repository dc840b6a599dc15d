#pragma once

// Manifest loading and the implementations behind the command-line tool.
// They live in the library, take explicit streams and return exit codes, so
// tests can drive them in-process exactly as the binary does.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stockflow/evaluation.hpp"
#include "stockflow/formulation.hpp"
#include "stockflow/heuristic.hpp"
#include "stockflow/instance.hpp"
#include "stockflow/solver.hpp"

namespace stockflow::cli {

// Shared exit-code contract: 0 proven optimal or completed heuristic,
// 2 incumbent without proof, 1 runtime failure, 64 unusable configuration.
constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kIncumbentOnly = 2;
constexpr int kUsage = 64;

struct RunConfig {
  std::string manifest;
  Objective objective;
  int splits = 0;  // 0 = exact full-horizon solve, K >= 1 = rolling horizon
  bool no_redistribution = false;
  bool with_baseline = false;  // also solve the pinned baseline for comparison
  std::uint64_t seed = 0;      // recorded in the report; solves are deterministic
  std::int64_t node_limit = 1'000'000;
  double time_limit_s = 3600.0;
  milp::NumericMode mode = milp::NumericMode::Rational;
  std::optional<ShareMode> share_mode_override;            // --c4-mode
  std::optional<std::vector<int>> relay_exempt_override;   // --c5-exempt
  std::optional<std::string> graph_override;               // force a topology
  enum class Solver { Builtin, LpExport, Adapter };
  Solver solver = Solver::Builtin;
  std::string adapter_cmd;
  std::string out_dir = ".";
};

// Network file plus the shipping-time surcharge it declares.
struct NetworkFile {
  DistributionNetwork network;
  ProcessingRule processing;
};

// Throws std::invalid_argument with a readable message on any defect:
// unreadable file, bad JSON, unknown topology, malformed fields.
NetworkFile load_network(const std::string& path,
                         const std::optional<std::string>& topology_override = {});

// Builds the full instance behind a manifest: network file, demand and
// probability CSVs, capacity profile (absent entries fall back to the
// standard case-study defaults), extra-stock schedule, receipts. Relative
// paths resolve against the manifest's directory.
Instance load_manifest(const std::string& path,
                       const std::optional<std::string>& topology_override = {});

// Scenario generation inputs. Exactly one of real_demand_csv (columns
// node_id,period,demand) or cumulative_csv (columns node_id,period,cumulative,
// turned into daily demand with stay_length) must be given.
struct ScenarioCmdConfig {
  std::string network_path;
  std::string real_demand_csv;
  std::string cumulative_csv;
  int stay_length = 0;
  std::string out_dir = ".";
  ScenarioGenConfig gen;
  std::optional<std::string> graph_override;
};

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_generate_scenarios(const ScenarioCmdConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_export_lp(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Plan file round trip (CSV header kind,i,j_or_k,t,amount).
void write_plan_csv(const Plan& plan, std::ostream& os);
Plan read_plan_csv(std::istream& is);

// Exact number parsing for config values: integers, decimals, scientific
// notation and "n/d" fractions. Throws std::invalid_argument, mentioning
// `where`, on anything else.
Rat64 parse_fraction(const std::string& text, const std::string& where = "value");

}  // namespace stockflow::cli
