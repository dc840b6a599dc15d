#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stockflow/cli.hpp"

namespace cli = stockflow::cli;
using stockflow::DemandRounding;
using stockflow::Family;
using stockflow::ShareMode;

int main(int argc, char** argv) {
  CLI::App app{"stockflow: multiperiod reallocation planning for hospital equipment"};
  app.require_subcommand(1);

  cli::RunConfig run;
  bool regret = false;
  bool floating = false;
  std::vector<int> exempt;
  std::string solver_name = "builtin";

  const std::map<std::string, Family> families{
      {"phi1", Family::WorstUnit},
      {"phi2", Family::WorstUnitPeriod},
      {"phi3", Family::WorstGroup},
      {"phi4", Family::TotalExpected},
  };
  const std::map<std::string, ShareMode> share_modes{
      {"exact", ShareMode::Exact},
      {"at-most", ShareMode::AtMost},
      {"at_most", ShareMode::AtMost},
  };

  CLI::Option* exempt_opt = nullptr;
  auto add_model_flags = [&](CLI::App* cmd) {
    cmd->add_option("--manifest,-m", run.manifest, "instance manifest (JSON)")->required();
    cmd->add_option("--objective", run.objective.family,
                    "planning criterion: phi1 worst unit, phi2 worst unit and period, "
                    "phi3 worst fairness group, phi4 expected total")
        ->transform(CLI::CheckedTransformer(families, CLI::ignore_case));
    cmd->add_flag("--regret", regret, "optimize worst-case regret instead of the plain value");
    cmd->add_flag("--no-redistribution", run.no_redistribution,
                  "pin every shipment to zero (placements stay free)");
    cmd->add_option("--node-limit", run.node_limit, "search node budget")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--time-limit", run.time_limit_s, "search time budget in seconds")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--float", floating,
                  "relaxations in floating point; incumbents are still verified exactly");
    cmd->add_option("--c4-mode", run.share_mode_override,
                    "override the placement rule: exact or at-most")
        ->transform(CLI::CheckedTransformer(share_modes, CLI::ignore_case));
    exempt_opt = cmd->add_option("--c5-exempt", exempt,
                                 "nodes allowed to forward freshly received stock")
                     ->delimiter(',');
    cmd->add_option("--graph", run.graph_override,
                    "override the network topology: complete, lc or arcs")
        ->check(CLI::IsMember({"complete", "lc", "arcs"}));
    cmd->add_option("--out,-o", run.out_dir, "output directory");
    cmd->add_option("--seed", run.seed, "recorded in the report for provenance");
  };

  int rc = 0;
  auto finish_run = [&] {
    run.objective.regret = regret;
    if (floating) run.mode = stockflow::milp::NumericMode::Floating;
    if (exempt_opt->count()) run.relay_exempt_override = exempt;
  };

  CLI::App* solve = app.add_subcommand("solve", "compute a reallocation plan");
  add_model_flags(solve);
  solve->add_option("--splits", run.splits,
                    "rolling-horizon subperiods; 0 solves the full horizon exactly")
      ->check(CLI::NonNegativeNumber);
  solve->add_flag("--with-baseline", run.with_baseline,
                  "also solve the no-redistribution baseline for comparison");
  solve->add_option("--solver", solver_name, "builtin, lp-export or adapter")
      ->check(CLI::IsMember({"builtin", "lp-export", "adapter"}));
  solve->add_option("--adapter-cmd", run.adapter_cmd,
                    "external solver command; {lp} and {out} are substituted");
  solve->callback([&] {
    finish_run();
    run.solver = solver_name == "adapter"     ? cli::RunConfig::Solver::Adapter
                 : solver_name == "lp-export" ? cli::RunConfig::Solver::LpExport
                                              : cli::RunConfig::Solver::Builtin;
    rc = cli::cmd_solve(run, std::cout, std::cerr);
  });

  CLI::App* export_lp = app.add_subcommand("export-lp", "write the model as an LP file");
  add_model_flags(export_lp);
  export_lp->callback([&] {
    finish_run();
    rc = cli::cmd_export_lp(run, std::cout, std::cerr);
  });

  cli::ScenarioCmdConfig gen;
  std::string bound = "1/2";
  std::string probabilities;
  const std::map<std::string, DemandRounding> roundings{
      {"nearest", DemandRounding::Nearest},
      {"floor", DemandRounding::Floor},
      {"ceil", DemandRounding::Ceil},
  };
  CLI::App* gs = app.add_subcommand("generate-scenarios",
                                    "derive the three-scenario demand set from real data");
  gs->add_option("--network", gen.network_path, "network file (JSON)")->required();
  gs->add_option("--demand", gen.real_demand_csv, "real demand CSV (node_id,period,demand)");
  gs->add_option("--cumulative", gen.cumulative_csv,
                 "cumulative admissions CSV (node_id,period,cumulative)");
  gs->add_option("--stay", gen.stay_length, "periods an admission stays active");
  gs->add_option("--seed", gen.gen.seed, "generator seed; fixed seed, identical output");
  gs->add_option("--bound", bound, "largest relative demand deviation, e.g. 1/2");
  gs->add_option("--rounding", gen.gen.rounding, "nearest, floor or ceil")
      ->transform(CLI::CheckedTransformer(roundings, CLI::ignore_case));
  gs->add_option("--zero-fix", gen.gen.zero_fix_support,
                 "replacement draw support for nonpositive demands: 1 or 2")
      ->check(CLI::Range(1, 2));
  gs->add_option("--probabilities", probabilities,
                 "three comma-separated scenario weights, e.g. 1/2,1/4,1/4");
  gs->add_option("--graph", gen.graph_override,
                 "override the network topology: complete, lc or arcs")
      ->check(CLI::IsMember({"complete", "lc", "arcs"}));
  gs->add_option("--out,-o", gen.out_dir, "output directory");
  gs->callback([&] {
    try {
      gen.gen.province_range_bound = cli::parse_fraction(bound, "--bound");
      if (!probabilities.empty()) {
        std::vector<stockflow::Rat64> p;
        std::string rest = probabilities;
        while (true) {
          size_t comma = rest.find(',');
          p.push_back(cli::parse_fraction(rest.substr(0, comma), "--probabilities"));
          if (comma == std::string::npos) break;
          rest = rest.substr(comma + 1);
        }
        gen.gen.probabilities = std::move(p);
      }
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << "\n";
      rc = cli::kUsage;
      return;
    }
    rc = cli::cmd_generate_scenarios(gen, std::cout, std::cerr);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kUsage;
  }
  return rc;
}
