// Python face of the planning core: manifest loading, exact and rolling
// solves, plan evaluation, scenario generation and LP export. Values cross
// the boundary as exact strings, never as floats.

#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stockflow/cli.hpp"
#include "stockflow/lp_io.hpp"

namespace py = pybind11;
using namespace stockflow;

namespace {

using ShipRow = std::tuple<int, int, int, std::int64_t>;

std::string exact_str(const BigRat& r) {
  using boost::multiprecision::cpp_int;
  cpp_int n = numerator(r), d = denominator(r);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

py::dict value_dict(const BigRat& v) {
  py::dict d;
  d["decimal"] = big_decimal_str(v);
  d["exact"] = exact_str(v);
  return d;
}

Family family_from(const std::string& name) {
  if (name == "phi1") return Family::WorstUnit;
  if (name == "phi2") return Family::WorstUnitPeriod;
  if (name == "phi3") return Family::WorstGroup;
  if (name == "phi4") return Family::TotalExpected;
  throw std::invalid_argument("unknown criterion '" + name + "', expected phi1..phi4");
}

const char* family_tag(int f) {
  switch ((Family)f) {
    case Family::WorstUnit: return "phi1";
    case Family::WorstUnitPeriod: return "phi2";
    case Family::WorstGroup: return "phi3";
    case Family::TotalExpected: return "phi4";
  }
  return "?";
}

Plan plan_from(const std::vector<ShipRow>& ship, const std::vector<ShipRow>& place) {
  Plan plan;
  for (const auto& [i, j, t, v] : ship)
    if (!plan.x.emplace(std::tuple(i, j, t), v).second)
      throw std::invalid_argument("duplicate shipment entry");
  for (const auto& [i, k, t, v] : place)
    if (!plan.s.emplace(std::tuple(i, k, t), v).second)
      throw std::invalid_argument("duplicate placement entry");
  return plan;
}

py::dict plan_dict(const Plan& plan) {
  py::list ship, place;
  for (const auto& [key, v] : plan.x) {
    auto [i, j, t] = key;
    ship.append(py::make_tuple(i, j, t, v));
  }
  for (const auto& [key, v] : plan.s) {
    auto [i, k, t] = key;
    place.append(py::make_tuple(i, k, t, v));
  }
  py::dict d;
  d["ship"] = std::move(ship);
  d["place"] = std::move(place);
  return d;
}

py::dict report_dict(const EvaluationReport& rep) {
  py::dict out;
  py::dict criteria;
  for (int f = 0; f < 4; ++f) criteria[family_tag(f)] = value_dict(rep.plain[(size_t)f]);
  out["criteria"] = std::move(criteria);
  out["feasible"] = rep.feasible();
  py::list violations;
  for (const auto& v : rep.violations) {
    py::dict e;
    e["constraint"] = v.constraint;
    e["unit"] = v.unit;
    e["period"] = v.period;
    e["scenario"] = v.scenario;
    e["slack"] = v.slack.str();
    e["detail"] = v.detail;
    violations.append(std::move(e));
  }
  out["violations"] = std::move(violations);
  std::int64_t shipped = 0, placed = 0;
  for (auto v : rep.redistributed) shipped += v;
  for (const auto& row : rep.placed)
    for (auto v : row) placed += v;
  py::dict totals;
  totals["redistributed"] = shipped;
  totals["placed"] = placed;
  out["totals"] = std::move(totals);
  return out;
}

milp::SolveOptions make_options(bool floating, std::int64_t node_limit, double time_limit) {
  milp::SolveOptions so;
  if (floating) so.mode = milp::NumericMode::Floating;
  so.node_limit = node_limit;
  so.time_limit_s = time_limit;
  return so;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "multiperiod reallocation planning core";

  py::class_<Instance>(m, "Instance")
      .def_property_readonly("nodes", [](const Instance& i) { return i.num_nodes(); })
      .def_property_readonly("horizon", [](const Instance& i) { return i.horizon; })
      .def_property_readonly("scenarios", [](const Instance& i) { return i.scenarios.count(); })
      .def("__repr__", [](const Instance& i) {
        return "Instance(nodes=" + std::to_string(i.num_nodes()) +
               ", horizon=" + std::to_string(i.horizon) +
               ", scenarios=" + std::to_string(i.scenarios.count()) + ")";
      });

  m.def(
      "load_manifest",
      [](const std::string& path) { return cli::load_manifest(path); },
      py::arg("path"),
      "Build an instance from a manifest file; see the file format notes in the README.");

  m.def(
      "validate",
      [](const Instance& inst) {
        std::vector<std::pair<bool, std::string>> out;
        for (const auto& f : validate_instance(inst)) out.emplace_back(f.fatal, f.message);
        return out;
      },
      py::arg("instance"), "Structural findings as (fatal, message) pairs.");

  m.def(
      "solve",
      [](const Instance& inst, const std::string& family, bool regret, int splits,
         bool no_redistribution, bool floating, std::int64_t node_limit,
         double time_limit) -> py::dict {
        Objective obj{family_from(family), regret};
        if (obj.family == Family::WorstGroup && inst.network.partition.empty())
          throw std::invalid_argument("criterion phi3 needs a fairness partition");
        if (splits < 0) throw std::invalid_argument("splits must be >= 0");
        if (splits > 0 && no_redistribution)
          throw std::invalid_argument("no_redistribution needs the exact solve (splits=0)");
        milp::SolveOptions so = make_options(floating, node_limit, time_limit);
        CompileOptions copts;
        copts.no_redistribution = no_redistribution;

        Plan plan;
        std::vector<Rat64> baselines;
        py::dict out;
        if (splits == 0) {
          milp::Model model;
          VariableIndex index;
          if (regret) {
            CompiledRegret c = compile_regret(inst, obj.family, so, copts);
            model = std::move(c.model);
            index = std::move(c.index);
            baselines = std::move(c.baselines.value);
          } else {
            Compiled c = compile(inst, obj, copts);
            model = std::move(c.model);
            index = std::move(c.index);
          }
          milp::Solution sol = milp::solve(model, so);
          out["status"] = milp::to_string(sol.status);
          if (!sol.has_incumbent) return out;
          plan = decode_plan(index, sol.values);
        } else {
          RollingResult rr =
              rolling_horizon_solve(inst, obj, make_even_split(inst.horizon, splits), so);
          plan = std::move(rr.plan);
          out["status"] = "heuristic";
          out["subproblems"] = (int)rr.subproblems.size();
          if (regret) {
            CompiledRegret c = compile_regret(inst, obj.family, so, copts);
            baselines = std::move(c.baselines.value);
          }
        }

        EvaluationReport rep = evaluate_plan(inst, plan);
        BigRat value = regret ? regret_value(rep, obj.family, baselines)
                              : rep.plain[(size_t)obj.family];
        out["objective"] = value_dict(value);
        out["plan"] = plan_dict(plan);
        if (regret) {
          py::list jb;
          for (const auto& b : baselines) jb.append(exact_str(to_big(b)));
          out["regret_baselines"] = std::move(jb);
        }
        py::dict rd = report_dict(rep);
        for (auto item : rd) out[item.first] = item.second;
        return out;
      },
      py::arg("instance"), py::arg("family") = "phi4", py::arg("regret") = false,
      py::arg("splits") = 0, py::arg("no_redistribution") = false, py::arg("floating") = false,
      py::arg("node_limit") = std::int64_t(1'000'000), py::arg("time_limit") = 3600.0,
      "Solve the instance exactly (splits=0) or by the rolling heuristic (splits=K). "
      "Returns a dict with status, objective, plan and the recomputed criterion values.");

  m.def(
      "evaluate",
      [](const Instance& inst, const std::vector<ShipRow>& ship,
         const std::vector<ShipRow>& place) {
        return report_dict(evaluate_plan(inst, plan_from(ship, place)));
      },
      py::arg("instance"), py::arg("ship") = std::vector<ShipRow>{},
      py::arg("place") = std::vector<ShipRow>{},
      "Referee a fixed plan: criterion values and rule violations, recomputed exactly. "
      "Rows are (i, j, t, amount) shipments and (i, k, t, amount) placements.");

  m.def(
      "generate_scenarios",
      [](const std::string& network_path,
         const std::vector<std::vector<std::int64_t>>& real_demand, std::uint64_t seed,
         const std::string& bound, const std::string& rounding, int zero_fix) -> py::dict {
        cli::NetworkFile nf = cli::load_network(network_path);
        ScenarioGenConfig cfg;
        cfg.seed = seed;
        cfg.province_range_bound = cli::parse_fraction(bound, "bound");
        if (rounding == "nearest")
          cfg.rounding = DemandRounding::Nearest;
        else if (rounding == "floor")
          cfg.rounding = DemandRounding::Floor;
        else if (rounding == "ceil")
          cfg.rounding = DemandRounding::Ceil;
        else
          throw std::invalid_argument("rounding must be nearest, floor or ceil");
        cfg.zero_fix_support = zero_fix;
        ScenarioSet set = generate_scenarios(real_demand, nf.network, cfg);
        py::dict out;
        out["names"] = set.names;
        py::list prob;
        for (const auto& p : set.prob) prob.append(p.str());
        out["prob"] = std::move(prob);
        out["demand"] = set.demand;
        return out;
      },
      py::arg("network_path"), py::arg("real_demand"), py::arg("seed") = 0,
      py::arg("bound") = "1/2", py::arg("rounding") = "nearest", py::arg("zero_fix") = 2,
      "Three-scenario demand set from real demands, indexed [node][period]. "
      "Deterministic for a fixed seed.");

  m.def(
      "export_lp",
      [](const Instance& inst, const std::string& lp_path, const std::string& sidecar_path,
         const std::string& family, bool regret) {
        Objective obj{family_from(family), regret};
        if (obj.family == Family::WorstGroup && inst.network.partition.empty())
          throw std::invalid_argument("criterion phi3 needs a fairness partition");
        milp::Model model;
        VariableIndex index;
        if (regret) {
          CompiledRegret c = compile_regret(inst, obj.family);
          model = std::move(c.model);
          index = std::move(c.index);
        } else {
          Compiled c = compile(inst, obj);
          model = std::move(c.model);
          index = std::move(c.index);
        }
        milp::write_lp_file(model, lp_path);
        std::ofstream os(sidecar_path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + sidecar_path);
        write_index_sidecar(index, os);
      },
      py::arg("instance"), py::arg("lp_path"), py::arg("sidecar_path"),
      py::arg("family") = "phi4", py::arg("regret") = false,
      "Write the compiled model as an LP file plus the column-map sidecar.");

  m.def(
      "even_split",
      [](int q, int parts) { return make_even_split(q, parts).breakpoints; },
      py::arg("horizon"), py::arg("parts"),
      "Breakpoints of the near-even rolling-horizon split (half-open subperiods).");
}
