#include "stockflow/evaluation.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace stockflow {

namespace {

std::int64_t max0(std::int64_t v) { return v < 0 ? 0 : v; }

std::int64_t extra_amount(const Instance& inst, int k, int t) {
  const auto& amt = inst.extra.amount;
  if ((size_t)(k - 1) >= amt.size()) return 0;
  const auto& row = amt[(size_t)(k - 1)];
  if ((size_t)(t - 1) >= row.size()) return 0;
  return row[(size_t)(t - 1)];
}

std::vector<std::vector<int>> sorted_regions(const Instance& inst) {
  auto regions = inst.network.regions;
  for (auto& r : regions) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  return regions;
}

[[noreturn]] void bad_plan(const std::string& what) {
  throw std::invalid_argument("evaluate_plan: " + what);
}

}  // namespace

Plan decode_plan(const VariableIndex& index, const std::vector<Rat64>& values) {
  Plan plan;
  auto take = [&](int col, const char* kind) {
    const Rat64& v = values.at((size_t)col);
    if (v.den() != 1)
      throw std::logic_error(std::string("decode_plan: fractional ") + kind + " column");
    return v.num();
  };
  for (int t = 1; t <= index.q; ++t)
    for (auto [i, j] : index.pairs) {
      std::int64_t amt = take(index.x_at(i, j, t), "shipment");
      if (amt > 0) plan.x[{i, j, t}] = amt;
    }
  for (int t = 1; t <= index.q; ++t)
    for (int k = 0; k < index.region_count; ++k)
      for (int i = 1; i <= index.n; ++i) {
        int col = index.s_at(i, k, t);
        if (col < 0) continue;
        std::int64_t amt = take(col, "placement");
        if (amt > 0) plan.s[{i, k + 1, t}] = amt;
      }
  return plan;
}

EvaluationReport evaluate_plan(const Instance& inst, const Plan& plan) {
  const int n = inst.num_nodes();
  const int q = inst.horizon;
  const int nw = inst.scenarios.count();
  const auto regions = sorted_regions(inst);
  const int K = (int)regions.size();
  if (n <= 0 || q <= 0) bad_plan("instance has no nodes or no periods");
  if (nw <= 0) bad_plan("instance has no scenarios");

  for (const auto& [key, amt] : plan.x) {
    auto [i, j, t] = key;
    if (amt < 0) bad_plan("negative shipment amount");
    if (i < 1 || i > n || j < 1 || j > n || i == j || !inst.reach.reachable(i, j))
      bad_plan("shipment over an unusable pair");
    if (t < 1 || t > q) bad_plan("shipment period outside the horizon");
  }
  for (const auto& [key, amt] : plan.s) {
    auto [i, k, t] = key;
    if (amt < 0) bad_plan("negative placement amount");
    if (k < 1 || k > K) bad_plan("placement into an unknown region");
    if (t < 1 || t > q) bad_plan("placement period outside the horizon");
    const auto& mem = regions[(size_t)(k - 1)];
    if (!std::binary_search(mem.begin(), mem.end(), i))
      bad_plan("placement at a node outside the region");
  }

  EvaluationReport rep;
  rep.n = n;
  rep.q = q;
  rep.nw = nw;

  auto zeros = [&] { return std::vector<std::int64_t>((size_t)q, 0); };
  std::vector<std::vector<std::int64_t>> placed_inc((size_t)n, zeros());
  std::vector<std::vector<std::int64_t>> arrived_inc((size_t)n, zeros());
  std::vector<std::vector<std::int64_t>> sent_inc((size_t)n, zeros());
  rep.placed.assign((size_t)K, zeros());
  rep.redistributed = zeros();

  for (const auto& [key, amt] : plan.s) {
    auto [i, k, t] = key;
    placed_inc[(size_t)(i - 1)][(size_t)(t - 1)] += amt;
    rep.placed[(size_t)(k - 1)][(size_t)(t - 1)] += amt;
  }
  for (const auto& [key, amt] : plan.x) {
    auto [i, j, t] = key;
    sent_inc[(size_t)(i - 1)][(size_t)(t - 1)] += amt;
    rep.redistributed[(size_t)(t - 1)] += amt;
    int ta = t + shipping_lag(inst.reach.at(i, j).length);
    if (ta <= q) arrived_inc[(size_t)(j - 1)][(size_t)(ta - 1)] += amt;
  }
  if (!inst.receipts.empty())
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < q && (size_t)t < inst.receipts[(size_t)i].size(); ++t)
        arrived_inc[(size_t)i][(size_t)t] += inst.receipts[(size_t)i][(size_t)t];

  rep.stock.assign((size_t)n, zeros());
  rep.received.assign((size_t)n, zeros());
  rep.delivered.assign((size_t)n, zeros());
  for (int i = 0; i < n; ++i) {
    std::int64_t cs = inst.profile.initial_stock.at((size_t)i), cr = 0, cd = 0;
    for (int t = 0; t < q; ++t) {
      cs += placed_inc[(size_t)i][(size_t)t];
      cr += arrived_inc[(size_t)i][(size_t)t];
      cd += sent_inc[(size_t)i][(size_t)t];
      rep.stock[(size_t)i][(size_t)t] = cs;
      rep.received[(size_t)i][(size_t)t] = cr;
      rep.delivered[(size_t)i][(size_t)t] = cd;
    }
  }

  auto cube = [&] {
    return std::vector<std::vector<std::vector<std::int64_t>>>(
        (size_t)nw, std::vector<std::vector<std::int64_t>>((size_t)n, zeros()));
  };
  rep.margin = cube();
  rep.excess = cube();
  rep.shortfall = cube();
  rep.shortfall_pos = cube();
  rep.total_shortfall_pos.assign((size_t)nw, zeros());
  rep.total_excess.assign((size_t)nw, zeros());
  rep.total_on_hand = zeros();

  for (int i = 0; i < n; ++i)
    for (int t = 0; t < q; ++t)
      rep.total_on_hand[(size_t)t] += rep.stock[(size_t)i][(size_t)t] +
                                      rep.received[(size_t)i][(size_t)t] -
                                      rep.delivered[(size_t)i][(size_t)t];

  for (int w = 0; w < nw; ++w) {
    const auto& dem = inst.scenarios.demand.at((size_t)w);
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < q; ++t) {
        std::int64_t d = dem.at((size_t)i).at((size_t)t);
        std::int64_t pos = rep.stock[(size_t)i][(size_t)t] + rep.received[(size_t)i][(size_t)t];
        std::int64_t prev_sent = t > 0 ? rep.delivered[(size_t)i][(size_t)(t - 1)] : 0;
        std::int64_t v = pos - prev_sent - d;
        std::int64_t ncd = d + rep.delivered[(size_t)i][(size_t)t] - pos;
        rep.margin[(size_t)w][(size_t)i][(size_t)t] = v;
        rep.excess[(size_t)w][(size_t)i][(size_t)t] = max0(v);
        rep.shortfall[(size_t)w][(size_t)i][(size_t)t] = ncd;
        rep.shortfall_pos[(size_t)w][(size_t)i][(size_t)t] = max0(ncd);
        rep.total_excess[(size_t)w][(size_t)t] += max0(v);
        rep.total_shortfall_pos[(size_t)w][(size_t)t] += max0(ncd);
      }
  }

  // Criterion values. node_total is one unit's shortfall summed over the
  // horizon under one scenario.
  const auto& p = inst.scenarios.prob;
  auto node_total = [&](int w, int i) {
    std::int64_t g = 0;
    for (int t = 0; t < q; ++t) g += rep.shortfall_pos[(size_t)w][(size_t)i][(size_t)t];
    return g;
  };
  {
    BigRat best = 0;
    for (int i = 0; i < n; ++i) {
      BigRat v = 0;
      for (int w = 0; w < nw; ++w) v += to_big(p[(size_t)w]) * BigRat(node_total(w, i));
      best = std::max(best, v);
    }
    rep.plain[0] = best;
    for (int w = 0; w < nw; ++w) {
      std::int64_t b = 0;
      for (int i = 0; i < n; ++i) b = std::max(b, node_total(w, i));
      rep.single[0].push_back(BigRat(b));
    }
  }
  {
    BigRat best = 0;
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < q; ++t) {
        BigRat v = 0;
        for (int w = 0; w < nw; ++w)
          v += to_big(p[(size_t)w]) * BigRat(rep.shortfall_pos[(size_t)w][(size_t)i][(size_t)t]);
        best = std::max(best, v);
      }
    rep.plain[1] = best;
    for (int w = 0; w < nw; ++w) {
      std::int64_t b = 0;
      for (int i = 0; i < n; ++i)
        for (int t = 0; t < q; ++t)
          b = std::max(b, rep.shortfall_pos[(size_t)w][(size_t)i][(size_t)t]);
      rep.single[1].push_back(BigRat(b));
    }
  }
  {
    BigRat best = 0;
    for (const auto& group : inst.network.partition) {
      BigRat v = 0;
      for (int w = 0; w < nw; ++w) {
        std::int64_t g = 0;
        for (int i : group) g += node_total(w, i - 1);
        v += to_big(p[(size_t)w]) * BigRat(g);
      }
      best = std::max(best, v);
    }
    rep.plain[2] = best;
    for (int w = 0; w < nw; ++w) {
      std::int64_t b = 0;
      for (const auto& group : inst.network.partition) {
        std::int64_t g = 0;
        for (int i : group) g += node_total(w, i - 1);
        b = std::max(b, g);
      }
      rep.single[2].push_back(BigRat(b));
    }
  }
  {
    BigRat v = 0;
    for (int w = 0; w < nw; ++w) {
      std::int64_t g = 0;
      for (int i = 0; i < n; ++i) g += node_total(w, i);
      v += to_big(p[(size_t)w]) * BigRat(g);
      rep.single[3].push_back(BigRat(g));
    }
    rep.plain[3] = v;
  }

  // Rule checks, constraint by constraint in a fixed order.
  auto push = [&](std::string c, int unit, int t, int w, Rat64 slack, std::string detail) {
    rep.violations.push_back({std::move(c), unit, t, w, slack, std::move(detail)});
  };

  for (int i = 1; i <= n; ++i)
    for (int t = 1; t <= q; ++t) {
      std::int64_t out = sent_inc[(size_t)(i - 1)][(size_t)(t - 1)];
      if (out == 0) continue;
      Rat64 gamma = inst.profile.share_fraction.at((size_t)(i - 1));
      for (int w = 0; w < nw; ++w) {
        Rat64 cap = gamma * Rat64(rep.excess[(size_t)w][(size_t)(i - 1)][(size_t)(t - 1)]);
        if (Rat64(out) > cap)
          push("C1", i, t, w, Rat64(out) - cap,
               "sent " + std::to_string(out) + ", sendable " + cap.str());
      }
    }

  for (const auto& [key, amt] : plan.x) {
    auto [i, j, t] = key;
    std::int64_t g = inst.profile.max_shipment.at((size_t)(i - 1));
    if (amt > g)
      push("C2", i, t, -1, Rat64(amt - g),
           "pair " + std::to_string(i) + "->" + std::to_string(j) + " ships " +
               std::to_string(amt) + ", per-delivery cap " + std::to_string(g));
  }

  {
    std::vector<std::vector<std::int64_t>> fanout((size_t)n, zeros());
    for (const auto& [key, amt] : plan.x) {
      auto [i, j, t] = key;
      (void)j;
      if (amt > 0) ++fanout[(size_t)(i - 1)][(size_t)(t - 1)];
    }
    for (int i = 1; i <= n; ++i) {
      const auto& cap = inst.profile.max_deliveries.at((size_t)(i - 1));
      if (!cap) continue;
      for (int t = 1; t <= q; ++t) {
        std::int64_t c = fanout[(size_t)(i - 1)][(size_t)(t - 1)];
        if (c > *cap)
          push("C3", i, t, -1, Rat64(c - *cap),
               std::to_string(c) + " deliveries, cap " + std::to_string(*cap));
      }
    }
  }

  for (int k = 1; k <= K; ++k)
    for (int t = 1; t <= q; ++t) {
      std::int64_t a = extra_amount(inst, k, t);
      std::int64_t got = rep.placed[(size_t)(k - 1)][(size_t)(t - 1)];
      bool broken = inst.share_mode == ShareMode::Exact ? got != a : got > a;
      if (broken)
        push("C4", k, t, -1, Rat64(got - a),
             "placed " + std::to_string(got) + " of " + std::to_string(a));
    }

  {
    std::vector<char> exempt((size_t)n + 1, 0);
    for (int i : inst.relay_exempt)
      if (i >= 1 && i <= n) exempt[(size_t)i] = 1;
    std::vector<std::vector<char>> in((size_t)n, std::vector<char>((size_t)q, 0)), out = in;
    for (const auto& [key, amt] : plan.x) {
      auto [i, j, t] = key;
      if (amt <= 0) continue;
      out[(size_t)(i - 1)][(size_t)(t - 1)] = 1;
      in[(size_t)(j - 1)][(size_t)(t - 1)] = 1;
    }
    for (int j = 1; j <= n; ++j) {
      if (exempt[(size_t)j]) continue;
      for (int t = 1; t <= q; ++t)
        if (in[(size_t)(j - 1)][(size_t)(t - 1)] && out[(size_t)(j - 1)][(size_t)(t - 1)])
          push("C5", j, t, -1, Rat64(1), "receives and sends in the same period");
    }
  }

  for (int i = 1; i <= n; ++i) {
    const auto& cap = inst.profile.storage_cap.at((size_t)(i - 1));
    if (!cap) continue;
    for (int t = 1; t <= q; ++t)
      for (int w = 0; w < nw; ++w) {
        std::int64_t h = rep.excess[(size_t)w][(size_t)(i - 1)][(size_t)(t - 1)];
        if (h > *cap)
          push("C6", i, t, w, Rat64(h - *cap),
               "excess " + std::to_string(h) + ", storage cap " + std::to_string(*cap));
      }
  }

  return rep;
}

BigRat regret_value(const EvaluationReport& report, Family family,
                    const std::vector<Rat64>& baselines) {
  const auto& single = report.single[(size_t)family];
  if (single.empty() || baselines.size() != single.size())
    throw std::invalid_argument("regret_value: one baseline per scenario required");
  BigRat worst = single[0] - to_big(baselines[0]);
  for (size_t w = 1; w < single.size(); ++w)
    worst = std::max(worst, single[w] - to_big(baselines[w]));
  return worst;
}

BaselineResult solve_baseline_no_redistribution(const Instance& inst, const Objective& obj,
                                                const milp::SolveOptions& so) {
  CompileOptions copts;
  copts.no_redistribution = true;
  BaselineResult out;
  if (obj.regret) {
    CompiledRegret cr = compile_regret(inst, obj.family, so, copts);
    out.solution = milp::solve(cr.model, so);
    if (out.solution.has_incumbent) {
      out.plan = decode_plan(cr.index, out.solution.values);
      out.report = evaluate_plan(inst, out.plan);
    }
  } else {
    Compiled c = compile(inst, obj, copts);
    out.solution = milp::solve(c.model, so);
    if (out.solution.has_incumbent) {
      out.plan = decode_plan(c.index, out.solution.values);
      out.report = evaluate_plan(inst, out.plan);
    }
  }
  return out;
}

namespace {

std::string header_name(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '"' || c == '\n' || c == '\r') c = '_';
  return s;
}

}  // namespace

FigureTables emit_figure_tables(const Instance& inst, const EvaluationReport& with_redist,
                                const EvaluationReport* without_redist) {
  const auto& a = with_redist;
  if (a.q != inst.horizon || a.nw != inst.scenarios.count() || a.n != inst.num_nodes())
    throw std::invalid_argument("emit_figure_tables: report does not match the instance");
  if (without_redist) {
    const auto& b = *without_redist;
    if (b.q != a.q || b.nw != a.nw || b.n != a.n || b.placed.size() != a.placed.size())
      throw std::invalid_argument("emit_figure_tables: comparison reports disagree in shape");
  }
  std::vector<std::string> wname;
  for (const auto& s : inst.scenarios.names) wname.push_back(header_name(s));

  FigureTables out;
  {
    std::ostringstream os;
    os << "period";
    for (const auto& s : wname) os << ",ncd_with_" << s;
    if (without_redist)
      for (const auto& s : wname) os << ",ncd_without_" << s;
    os << "\n";
    for (int t = 0; t < a.q; ++t) {
      os << (t + 1);
      for (int w = 0; w < a.nw; ++w) os << ',' << a.total_shortfall_pos[(size_t)w][(size_t)t];
      if (without_redist)
        for (int w = 0; w < a.nw; ++w)
          os << ',' << without_redist->total_shortfall_pos[(size_t)w][(size_t)t];
      os << "\n";
    }
    out.ncd = os.str();
  }
  {
    std::ostringstream os;
    os << "period";
    for (const auto& s : wname) os << ",excess_with_" << s;
    os << ",on_hand_with";
    if (without_redist) {
      for (const auto& s : wname) os << ",excess_without_" << s;
      os << ",on_hand_without";
    }
    os << "\n";
    for (int t = 0; t < a.q; ++t) {
      os << (t + 1);
      for (int w = 0; w < a.nw; ++w) os << ',' << a.total_excess[(size_t)w][(size_t)t];
      os << ',' << a.total_on_hand[(size_t)t];
      if (without_redist) {
        for (int w = 0; w < a.nw; ++w)
          os << ',' << without_redist->total_excess[(size_t)w][(size_t)t];
        os << ',' << without_redist->total_on_hand[(size_t)t];
      }
      os << "\n";
    }
    out.stock = os.str();
  }
  {
    std::ostringstream os;
    os << "period,shipped_with";
    if (without_redist) os << ",shipped_without";
    os << "\n";
    for (int t = 0; t < a.q; ++t) {
      os << (t + 1) << ',' << a.redistributed[(size_t)t];
      if (without_redist) os << ',' << without_redist->redistributed[(size_t)t];
      os << "\n";
    }
    out.redistributed = os.str();
  }
  {
    std::ostringstream os;
    os << "region,period,scheduled,placed_with";
    if (without_redist) os << ",placed_without";
    os << "\n";
    int K = (int)a.placed.size();
    for (int k = 1; k <= K; ++k)
      for (int t = 1; t <= a.q; ++t) {
        std::int64_t sched = extra_amount(inst, k, t);
        std::int64_t got = a.placed[(size_t)(k - 1)][(size_t)(t - 1)];
        std::int64_t other =
            without_redist ? without_redist->placed.at((size_t)(k - 1))[(size_t)(t - 1)] : 0;
        if (sched == 0 && got == 0 && other == 0) continue;
        os << k << ',' << t << ',' << sched << ',' << got;
        if (without_redist) os << ',' << other;
        os << "\n";
      }
    out.shares = os.str();
  }
  return out;
}

}  // namespace stockflow
