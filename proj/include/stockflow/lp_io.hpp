#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stockflow/milp.hpp"

namespace stockflow::milp {

struct LpParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CPLEX-style LP text: Minimize / Subject To / Bounds / Generals / Binaries /
// End. Only minimization models are produced and accepted. Output is
// deterministic: fixed section order, variables and rows in model order,
// lines wrapped at a fixed width.
void write_lp(const Model& model, std::ostream& os);
void write_lp_file(const Model& model, const std::string& path);
std::string lp_string(const Model& model);

Model parse_lp(std::istream& is);
Model parse_lp_file(const std::string& path);

// Plain solution listing: optional "status <word>" and "objective <number>"
// lines, then one "<var> <number>" per line; '#' starts a comment. Variables
// not listed are taken as zero by consumers.
struct ParsedSolution {
  std::string status;
  bool has_objective = false;
  Rat64 objective{};
  std::vector<std::pair<std::string, Rat64>> values;
};

ParsedSolution parse_solution(std::istream& is);
ParsedSolution parse_solution_file(const std::string& path);

void write_solution(const Model& model, const Solution& sol, std::ostream& os);

}  // namespace stockflow::milp
