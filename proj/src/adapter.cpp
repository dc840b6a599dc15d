#include "stockflow/adapter.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <unistd.h>

#include "stockflow/lp_io.hpp"

namespace stockflow::milp {
namespace {

namespace fs = std::filesystem;

std::string substitute(std::string tmpl, const std::string& key, const std::string& value) {
  size_t pos = 0;
  while ((pos = tmpl.find(key, pos)) != std::string::npos) {
    tmpl.replace(pos, key.size(), value);
    pos += value.size();
  }
  return tmpl;
}

// Tolerance feasibility in doubles; external solvers report rounded values,
// so the exact checker would reject legitimate answers.
std::vector<std::string> check_approx(const Model& mdl, const std::vector<Rat64>& x, double eps) {
  std::vector<std::string> out;
  std::vector<double> v(x.size());
  for (size_t j = 0; j < x.size(); ++j) v[j] = x[j].to_double();
  for (int j = 0; j < mdl.num_vars(); ++j) {
    const std::string& nm = mdl.var_names[(size_t)j];
    if (mdl.lb[(size_t)j].finite && v[(size_t)j] < mdl.lb[(size_t)j].value.to_double() - eps)
      out.push_back(nm + " below lower bound");
    if (mdl.ub[(size_t)j].finite && v[(size_t)j] > mdl.ub[(size_t)j].value.to_double() + eps)
      out.push_back(nm + " above upper bound");
    if (integral_kind(mdl.var_kinds[(size_t)j]) &&
        std::abs(v[(size_t)j] - std::round(v[(size_t)j])) > eps)
      out.push_back(nm + " not integral");
  }
  for (const auto& row : mdl.rows) {
    double act = 0;
    for (auto k = row.begin; k != row.end; ++k)
      act += mdl.terms[k].coef.to_double() * v[(size_t)mdl.terms[k].var];
    double rhs = row.rhs.to_double();
    double scale = std::max(1.0, std::abs(rhs));
    bool bad = (row.sense == Sense::Le && act > rhs + eps * scale) ||
               (row.sense == Sense::Ge && act < rhs - eps * scale) ||
               (row.sense == Sense::Eq && std::abs(act - rhs) > eps * scale);
    if (bad) out.push_back("row " + row.name + " violated");
  }
  return out;
}

SolveStatus map_status(const std::string& word) {
  if (word.empty() || word == "optimal" || word == "opt" || word == "feasible")
    return SolveStatus::Optimal;
  if (word == "infeasible") return SolveStatus::Infeasible;
  if (word == "unbounded") return SolveStatus::Unbounded;
  throw SolverError("external solver reported unrecognized status '" + word + "'");
}

}  // namespace

Solution solve_with_adapter(const Model& model, const AdapterConfig& cfg,
                            const SolveOptions& builtin_options) {
  if (cfg.command.find("{out}") == std::string::npos)
    throw std::invalid_argument("adapter command must contain {out}");

  static std::atomic<unsigned> counter{0};
  fs::path dir = cfg.workdir.empty() ? fs::temp_directory_path() : fs::path(cfg.workdir);
  std::string stem =
      "stockflow_" + std::to_string(getpid()) + "_" + std::to_string(counter.fetch_add(1));
  fs::path lp_path = dir / (stem + ".lp");
  fs::path out_path = dir / (stem + ".sol");

  write_lp_file(model, lp_path.string());
  std::string cmd = substitute(substitute(cfg.command, "{lp}", lp_path.string()), "{out}",
                               out_path.string());
  int rc = std::system(cmd.c_str());
  auto cleanup = [&] {
    if (!cfg.keep_files) {
      std::error_code ec;
      fs::remove(lp_path, ec);
      fs::remove(out_path, ec);
    }
  };
  if (rc != 0) {
    cleanup();
    throw SolverError("adapter command failed with exit code " + std::to_string(rc) + ": " + cmd);
  }
  ParsedSolution ext;
  try {
    ext = parse_solution_file(out_path.string());
  } catch (const std::exception& e) {
    cleanup();
    throw SolverError(std::string("adapter output unreadable: ") + e.what());
  }
  cleanup();

  SolveStatus ext_status = map_status(ext.status);
  Solution builtin = solve(model, builtin_options);

  if (ext_status != builtin.status) {
    // Accept the builtin's limit statuses only when they agree on what's known.
    throw SolverError(std::string("adapter/builtin status mismatch: external ") +
                      to_string(ext_status) + ", builtin " + to_string(builtin.status));
  }
  if (ext_status != SolveStatus::Optimal) {
    Solution out;
    out.status = ext_status;
    out.stats = builtin.stats;
    return out;
  }

  auto index = model.var_index();
  std::vector<Rat64> values((size_t)model.num_vars(), Rat64(0));
  for (const auto& [nm, v] : ext.values) {
    auto it = index.find(nm);
    if (it == index.end()) throw SolverError("adapter solution names unknown variable '" + nm + "'");
    Rat64 val = v;
    // Snap integer variables that are within tolerance of an integer.
    if (integral_kind(model.var_kinds[(size_t)it->second]) && !val.is_integer()) {
      std::int64_t r = val.round_nearest();
      if (std::abs(val.to_double() - (double)r) <= cfg.tolerance) val = Rat64(r);
    }
    values[(size_t)it->second] = val;
  }
  auto bad = check_approx(model, values, cfg.tolerance);
  if (!bad.empty())
    throw SolverError("adapter solution infeasible for the model: " + bad.front() +
                      (bad.size() > 1 ? " (+" + std::to_string(bad.size() - 1) + " more)" : ""));

  double ext_obj = to_double(model.objective_of(values));
  double own_obj = to_double(builtin.objective);
  double scale = std::max({1.0, std::abs(ext_obj), std::abs(own_obj)});
  if (std::abs(ext_obj - own_obj) > cfg.tolerance * scale)
    throw SolverError("adapter/builtin objective mismatch: external " + std::to_string(ext_obj) +
                      " vs builtin " + std::to_string(own_obj));

  Solution out;
  out.status = SolveStatus::Optimal;
  out.has_incumbent = true;
  out.values = std::move(values);
  out.objective = model.objective_of(out.values);
  out.best_bound = out.objective;
  out.stats = builtin.stats;
  return out;
}

}  // namespace stockflow::milp
