#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "stockflow/rational.hpp"

namespace stockflow::milp {

enum class Sense { Le, Ge, Eq };
enum class VarKind { Continuous, Integer, Binary };

inline bool integral_kind(VarKind k) { return k != VarKind::Continuous; }

// One-sided bound. finite == false means the bound is absent (infinite).
struct Bound {
  bool finite = false;
  Rat64 value{};
  static Bound none() { return {}; }
  static Bound at(Rat64 v) { return {true, v}; }
};

// Mixed-integer linear program, minimization form:
//   min  obj . x + obj_const
//   s.t. rows (Le/Ge/Eq)
//        lb <= x <= ub, integrality per kind.
// Row terms live in one arena; each row owns a contiguous slice, so rows must
// be built one at a time (add_row, then row_term for each coefficient).
struct Model {
  std::string name = "model";

  std::vector<std::string> var_names;
  std::vector<VarKind> var_kinds;
  std::vector<Bound> lb, ub;
  std::vector<Rat64> obj;
  Rat64 obj_const{};

  struct Term {
    std::int32_t var;
    Rat64 coef;
  };
  struct Row {
    std::string name;
    Sense sense;
    Rat64 rhs;
    std::uint32_t begin = 0, end = 0;
  };
  std::vector<Term> terms;
  std::vector<Row> rows;

  int num_vars() const { return (int)var_names.size(); }
  int num_rows() const { return (int)rows.size(); }

  int add_var(std::string nm, VarKind kind, Bound lo, Bound hi) {
    var_names.push_back(std::move(nm));
    var_kinds.push_back(kind);
    lb.push_back(lo);
    ub.push_back(hi);
    obj.push_back(Rat64(0));
    return num_vars() - 1;
  }
  int add_cont(std::string nm, Bound lo, Bound hi) {
    return add_var(std::move(nm), VarKind::Continuous, lo, hi);
  }
  int add_int(std::string nm, Bound lo, Bound hi) {
    return add_var(std::move(nm), VarKind::Integer, lo, hi);
  }
  int add_bin(std::string nm) {
    return add_var(std::move(nm), VarKind::Binary, Bound::at(Rat64(0)),
                   Bound::at(Rat64(1)));
  }

  void set_obj(int var, Rat64 c) { obj[(size_t)var] = c; }

  int add_row(std::string nm, Sense sense, Rat64 rhs) {
    Row r;
    r.name = std::move(nm);
    r.sense = sense;
    r.rhs = rhs;
    r.begin = r.end = (std::uint32_t)terms.size();
    rows.push_back(std::move(r));
    return num_rows() - 1;
  }
  void row_term(int var, Rat64 coef) {
    if (rows.empty()) throw std::logic_error("row_term before add_row");
    terms.push_back({(std::int32_t)var, coef});
    rows.back().end = (std::uint32_t)terms.size();
  }

  std::unordered_map<std::string, int> var_index() const {
    std::unordered_map<std::string, int> ix;
    ix.reserve(var_names.size());
    for (int j = 0; j < num_vars(); ++j) ix.emplace(var_names[(size_t)j], j);
    return ix;
  }

  // Exact objective value of a point (size num_vars).
  BigRat objective_of(const std::vector<Rat64>& x) const;

  // Exact feasibility check: returns human-readable violation descriptions,
  // empty when x satisfies every bound, row and integrality requirement.
  std::vector<std::string> check_point(const std::vector<Rat64>& x) const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NodeLimit, TimeLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NodeLimit: return "node_limit";
    case SolveStatus::TimeLimit: return "time_limit";
  }
  return "?";
}

struct SolveStats {
  std::int64_t nodes = 0;
  std::int64_t pivots = 0;
  double seconds = 0;
  bool exact_fallback = false;
};

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  bool has_incumbent = false;
  std::vector<Rat64> values;  // structural variables, model order
  BigRat objective{};         // incumbent objective, incl. constant
  BigRat best_bound{};        // proven lower bound (valid when has_incumbent or Optimal)
  SolveStats stats;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace stockflow::milp
