#include "stockflow/milp.hpp"

namespace stockflow::milp {

BigRat Model::objective_of(const std::vector<Rat64>& x) const {
  BigRat z = to_big(obj_const);
  for (int j = 0; j < num_vars(); ++j)
    if (!obj[(size_t)j].is_zero()) z += to_big(obj[(size_t)j]) * to_big(x[(size_t)j]);
  return z;
}

std::vector<std::string> Model::check_point(const std::vector<Rat64>& x) const {
  std::vector<std::string> out;
  if ((int)x.size() != num_vars()) {
    out.push_back("point has " + std::to_string(x.size()) + " values, model has " +
                  std::to_string(num_vars()) + " variables");
    return out;
  }
  for (int j = 0; j < num_vars(); ++j) {
    const auto& v = x[(size_t)j];
    const auto& nm = var_names[(size_t)j];
    if (lb[(size_t)j].finite && v < lb[(size_t)j].value)
      out.push_back(nm + " = " + v.str() + " below lower bound " + lb[(size_t)j].value.str());
    if (ub[(size_t)j].finite && v > ub[(size_t)j].value)
      out.push_back(nm + " = " + v.str() + " above upper bound " + ub[(size_t)j].value.str());
    if (integral_kind(var_kinds[(size_t)j]) && !v.is_integer())
      out.push_back(nm + " = " + v.str() + " not integral");
  }
  for (const auto& row : rows) {
    BigRat act = 0;
    for (auto k = row.begin; k != row.end; ++k)
      act += to_big(terms[k].coef) * to_big(x[(size_t)terms[k].var]);
    BigRat rhs = to_big(row.rhs);
    bool bad = (row.sense == Sense::Le && act > rhs) ||
               (row.sense == Sense::Ge && act < rhs) || (row.sense == Sense::Eq && act != rhs);
    if (bad)
      out.push_back("row " + row.name + ": activity " + act.str() + " violates " +
                    (row.sense == Sense::Le ? "<= " : row.sense == Sense::Ge ? ">= " : "= ") +
                    rhs.str());
  }
  return out;
}

}  // namespace stockflow::milp
