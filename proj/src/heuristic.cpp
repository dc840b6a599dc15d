#include "stockflow/heuristic.hpp"

#include <algorithm>
#include <chrono>
#include <json.hpp>
#include <stdexcept>

namespace stockflow {

HorizonSplit make_even_split(int q, int K) {
  if (q < 1 || K < 1 || K > q)
    throw std::invalid_argument("make_even_split: need 1 <= K <= q");
  HorizonSplit split;
  split.breakpoints.reserve((size_t)K + 1);
  split.breakpoints.push_back(1);
  int base = q / K, rem = q % K;
  for (int k = 1; k <= K; ++k)
    split.breakpoints.push_back(split.breakpoints.back() + base + (k <= rem ? 1 : 0));
  return split;
}

namespace {

void check_split(const HorizonSplit& split, int q) {
  const auto& b = split.breakpoints;
  if (b.size() < 2 || b.front() != 1 || b.back() != q + 1)
    throw std::invalid_argument("rolling_horizon_solve: split does not span the horizon");
  for (size_t k = 1; k < b.size(); ++k)
    if (b[k] <= b[k - 1])
      throw std::invalid_argument("rolling_horizon_solve: breakpoints must increase");
}

}  // namespace

RollingResult rolling_horizon_solve(const Instance& inst, const Objective& obj,
                                    const HorizonSplit& split,
                                    const milp::SolveOptions& limits) {
  const int n = inst.num_nodes();
  const int q = inst.horizon;
  check_split(split, q);
  const int K = split.parts();
  const int KR = (int)inst.network.regions.size();

  auto orig_receipt = [&](int i, int g) -> std::int64_t {
    if (inst.receipts.empty()) return 0;
    const auto& row = inst.receipts.at((size_t)(i - 1));
    return (size_t)(g - 1) < row.size() ? row[(size_t)(g - 1)] : 0;
  };
  auto orig_extra = [&](int k, int g) -> std::int64_t {
    if ((size_t)(k - 1) >= inst.extra.amount.size()) return 0;
    const auto& row = inst.extra.amount[(size_t)(k - 1)];
    return (size_t)(g - 1) < row.size() ? row[(size_t)(g - 1)] : 0;
  };

  RollingResult out;
  // Frozen-prefix accounting: placements and sendings so far, and the global
  // arrival schedule induced by frozen shipments.
  std::vector<std::int64_t> placed_cum((size_t)n, 0), sent_cum((size_t)n, 0);
  std::vector<std::vector<std::int64_t>> arrive((size_t)n,
                                                std::vector<std::int64_t>((size_t)q, 0));

  for (int k = 1; k <= K; ++k) {
    const int f = split.first(k);
    const int past = split.past_last(k);  // frozen periods are f .. past-1
    const int l = std::min(past, q);      // window adds the boundary period
    const int m = l - f + 1;
    const int frozen_local = std::min(past - f, m);

    // Boundary state: everything placed, already arrived (through f) and sent
    // by the frozen prefix, folded into synthetic initial stock.
    std::vector<std::int64_t> carry((size_t)n, 0);
    for (int i = 1; i <= n; ++i) {
      std::int64_t inflow = 0;
      for (int g = 1; g <= f; ++g) inflow += orig_receipt(i, g) + arrive[(size_t)(i - 1)][(size_t)(g - 1)];
      std::int64_t c = inst.profile.initial_stock.at((size_t)(i - 1)) +
                       placed_cum[(size_t)(i - 1)] + inflow - sent_cum[(size_t)(i - 1)];
      if (c < 0)
        throw std::logic_error("rolling_horizon_solve: negative carry-over, prefix oversends");
      carry[(size_t)(i - 1)] = c;
    }

    Instance sub;
    sub.network = inst.network;
    sub.reach = inst.reach;
    sub.horizon = m;
    sub.profile = inst.profile;
    sub.profile.initial_stock = carry;
    sub.share_mode = inst.share_mode;
    sub.relay_exempt = inst.relay_exempt;
    sub.scenarios.names = inst.scenarios.names;
    sub.scenarios.prob = inst.scenarios.prob;
    sub.scenarios.demand.assign(inst.scenarios.demand.size(), {});
    for (size_t w = 0; w < inst.scenarios.demand.size(); ++w) {
      auto& dw = sub.scenarios.demand[w];
      dw.assign((size_t)n, std::vector<std::int64_t>((size_t)m, 0));
      for (int i = 0; i < n; ++i)
        for (int t = 0; t < m; ++t)
          dw[(size_t)i][(size_t)t] = inst.scenarios.demand[w].at((size_t)i).at((size_t)(f + t - 1));
    }
    // Receipts local to the window: scheduled ones plus frozen in-flight
    // arrivals. Period f inflow already sits in the carry-over.
    sub.receipts.assign((size_t)n, std::vector<std::int64_t>((size_t)m, 0));
    for (int i = 1; i <= n; ++i)
      for (int t = 2; t <= m; ++t) {
        int g = f + t - 1;
        sub.receipts[(size_t)(i - 1)][(size_t)(t - 1)] =
            orig_receipt(i, g) + arrive[(size_t)(i - 1)][(size_t)(g - 1)];
      }
    // Extra stock on the boundary period belongs to the next subproblem,
    // whose first period it is; everything frozen here keeps its schedule.
    if (KR > 0) {
      sub.extra.amount.assign((size_t)KR, std::vector<std::int64_t>((size_t)m, 0));
      for (int kr = 1; kr <= KR; ++kr)
        for (int t = 1; t <= m; ++t) {
          int g = f + t - 1;
          if (g < past) sub.extra.amount[(size_t)(kr - 1)][(size_t)(t - 1)] = orig_extra(kr, g);
        }
    }

    SubproblemDiag diag;
    diag.index = k;
    diag.first_period = f;
    diag.last_period = l;
    diag.frozen_through = f + frozen_local - 1;
    diag.carry_in = carry;

    auto t0 = std::chrono::steady_clock::now();
    milp::Solution sol;
    VariableIndex index;
    try {
      if (obj.regret) {
        CompiledRegret cr = compile_regret(sub, obj.family, limits);
        sol = milp::solve(cr.model, limits);
        index = std::move(cr.index);
      } else {
        Compiled c = compile(sub, obj);
        sol = milp::solve(c.model, limits);
        index = std::move(c.index);
      }
    } catch (const milp::SolverError& e) {
      throw milp::SolverError("subproblem " + std::to_string(k) + ": " + e.what());
    }
    diag.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!sol.has_incumbent)
      throw milp::SolverError("subproblem " + std::to_string(k) + " has no usable plan (" +
                              milp::to_string(sol.status) + ")");
    diag.status = sol.status;
    diag.hit_limit = sol.status != milp::SolveStatus::Optimal;
    diag.objective = sol.objective;

    Plan subplan = decode_plan(index, sol.values);
    for (const auto& [key, amt] : subplan.x) {
      auto [i, j, t] = key;
      if (t > frozen_local) continue;  // boundary decisions are re-decided next round
      int g = f + t - 1;
      out.plan.x[{i, j, g}] = amt;
      sent_cum[(size_t)(i - 1)] += amt;
      int ga = g + shipping_lag(inst.reach.at(i, j).length);
      if (ga <= q) arrive[(size_t)(j - 1)][(size_t)(ga - 1)] += amt;
    }
    for (const auto& [key, amt] : subplan.s) {
      auto [i, kr, t] = key;
      if (t > frozen_local) continue;
      out.plan.s[{i, kr, f + t - 1}] = amt;
      placed_cum[(size_t)(i - 1)] += amt;
    }
    out.subproblems.push_back(std::move(diag));
  }
  return out;
}

std::string diagnostics_json(const RollingResult& result) {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& d : result.subproblems) {
    nlohmann::json j;
    j["k"] = d.index;
    j["first_period"] = d.first_period;
    j["last_period"] = d.last_period;
    j["frozen_through"] = d.frozen_through;
    j["status"] = milp::to_string(d.status);
    j["hit_limit"] = d.hit_limit;
    j["objective"] = big_decimal_str(d.objective);
    j["wall_seconds"] = d.wall_seconds;
    j["carry_in"] = d.carry_in;
    subs.push_back(std::move(j));
  }
  nlohmann::json top;
  top["subproblems"] = std::move(subs);
  top["shipments"] = (int)result.plan.x.size();
  top["placements"] = (int)result.plan.s.size();
  return top.dump(2);
}

}  // namespace stockflow
