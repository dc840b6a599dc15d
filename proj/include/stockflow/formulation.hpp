#pragma once

// Compiles an instance into a mixed-integer model for any of the eight
// planning criteria: four aggregation families, each in a plain and a
// worst-case-regret variant. The excess-stock max and the positive-part
// shortfall are linearized exactly, with per-cell big-M constants derived
// from the instance data.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stockflow/instance.hpp"
#include "stockflow/milp.hpp"
#include "stockflow/solver.hpp"

namespace stockflow {

enum class Family {
  WorstUnit,        // largest per-unit expected total shortfall
  WorstUnitPeriod,  // largest per-unit-and-period expected shortfall
  WorstGroup,       // largest per-fairness-group expected total shortfall
  TotalExpected,    // plain expected total shortfall
};

struct Objective {
  Family family = Family::TotalExpected;
  bool regret = false;
};

struct CompileOptions {
  bool no_redistribution = false;  // pin every shipment (and its flag) to zero
};

// Column layout of a compiled model. Entries are -1 where no column exists:
// unusable node pairs, non-members of a sharing region, or an epigraph
// variable the chosen objective does not need. Shipments that could never
// arrive inside the horizon keep their columns but are fixed to zero.
struct VariableIndex {
  int n = 0, q = 0, nw = 0;
  int region_count = 0;
  std::vector<std::pair<int, int>> pairs;  // usable (i,j), lexicographic

  std::vector<int> x, y;          // [(t-1)*n*n + (i-1)*n + (j-1)]
  std::vector<int> s;             // [((t-1)*K + k)*n + (i-1)], k 0-based
  std::vector<int> h, b, ncdp;    // [((t-1)*n + (i-1))*nw + w], w 0-based
  int eta = -1;
  int alpha = -1;

  int x_at(int i, int j, int t) const { return x[cell(i, j, t)]; }
  int y_at(int i, int j, int t) const { return y[cell(i, j, t)]; }
  int s_at(int i, int k, int t) const {
    return s[(size_t)(((t - 1) * region_count + k) * n + (i - 1))];
  }
  int h_at(int i, int t, int w) const { return h[scell(i, t, w)]; }
  int b_at(int i, int t, int w) const { return b[scell(i, t, w)]; }
  int ncdp_at(int i, int t, int w) const { return ncdp[scell(i, t, w)]; }

 private:
  size_t cell(int i, int j, int t) const {
    return (size_t)((t - 1) * n * n + (i - 1) * n + (j - 1));
  }
  size_t scell(int i, int t, int w) const {
    return (size_t)(((t - 1) * n + (i - 1)) * nw + w);
  }
};

struct Compiled {
  milp::Model model;
  VariableIndex index;
};

// Plain-objective compilation. Rejects the group family when the network has
// no fairness partition, and regret objectives (use compile_regret).
Compiled compile(const Instance& inst, const Objective& obj, const CompileOptions& opts = {});

// Best achievable value of the plain family under each single scenario, with
// the solve provenance that proves optimality.
struct RegretBaselines {
  std::vector<Rat64> value;
  std::vector<milp::SolveStats> stats;
};

struct CompiledRegret {
  milp::Model model;
  VariableIndex index;
  RegretBaselines baselines;
};

// Solves one restricted model per scenario to proven optimality, then builds
// the full model minimizing the worst gap to those baselines. Throws if any
// baseline search stops short of a proof, since an incumbent would corrupt
// the guarantee.
CompiledRegret compile_regret(const Instance& inst, Family family,
                              const milp::SolveOptions& solve_options = {},
                              const CompileOptions& opts = {});

struct ModelStatistics {
  std::map<std::string, int> rows_by_tag;  // tag = row name up to the first '_'
  int integer_columns = 0;
  int binary_columns = 0;
  int continuous_columns = 0;
  int fixed_columns = 0;  // declared with equal lower and upper bound
};

ModelStatistics model_statistics(const milp::Model& model);

// Machine-readable column map (JSON): tuples behind each column so solutions
// from any solver can be decoded back into plans. Deterministic output.
void write_index_sidecar(const VariableIndex& index, std::ostream& os);

}  // namespace stockflow
