// Standalone MILP solver over LP files. Reads a minimization model, writes a
// solution listing, and reports the outcome through its exit code, which
// makes it directly usable as an external-solver command for the planner
// (adapter command "lp_solve {lp} {out}").

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stockflow/lp_io.hpp"
#include "stockflow/solver.hpp"

int main(int argc, char** argv) {
  namespace milp = stockflow::milp;
  CLI::App app{"MILP solver for LP files"};
  std::string lp_path, out_path;
  bool floating = false;
  milp::SolveOptions so;
  app.add_option("lp", lp_path, "LP model file")->required();
  app.add_option("out", out_path, "solution listing to write")->required();
  app.add_flag("--float", floating, "floating-point relaxations, exact incumbents");
  app.add_option("--node-limit", so.node_limit, "search node budget")
      ->check(CLI::PositiveNumber);
  app.add_option("--time-limit", so.time_limit_s, "search time budget in seconds")
      ->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }
  if (floating) so.mode = milp::NumericMode::Floating;

  try {
    milp::Model model = milp::parse_lp_file(lp_path);
    milp::Solution sol = milp::solve(model, so);
    std::ofstream os(out_path, std::ios::binary);
    if (!os) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 1;
    }
    milp::write_solution(model, sol, os);
    std::cout << "status " << milp::to_string(sol.status) << "\n";
    if (sol.status == milp::SolveStatus::Optimal) return 0;
    return sol.has_incumbent ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
