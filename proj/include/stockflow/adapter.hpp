#pragma once

#include <string>

#include "stockflow/milp.hpp"
#include "stockflow/solver.hpp"

namespace stockflow::milp {

// External MILP solver hook. `command` is a shell template in which {lp} is
// replaced by the path of an LP file written for the model and {out} by the
// path the command must write its solution listing to (see lp_io.hpp for both
// formats). The external answer is tolerance-checked against the model and
// cross-checked against the builtin solver; disagreement beyond 1e-6 is an
// error, never silently accepted.
struct AdapterConfig {
  std::string command;
  std::string workdir;  // empty: system temp directory
  double tolerance = 1e-6;
  bool keep_files = false;
};

Solution solve_with_adapter(const Model& model, const AdapterConfig& cfg,
                            const SolveOptions& builtin_options = {});

}  // namespace stockflow::milp
