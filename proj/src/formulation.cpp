#include "stockflow/formulation.hpp"

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace stockflow {

namespace {

using milp::Bound;
using milp::Model;
using milp::Sense;
using milp::VarKind;

std::int64_t max0(std::int64_t v) { return v < 0 ? 0 : v; }

std::string row_id(const char* base, std::initializer_list<int> ids) {
  std::string s(base);
  for (int v : ids) {
    s += '_';
    s += std::to_string(v);
  }
  return s;
}

const char* family_tag(Family f) {
  switch (f) {
    case Family::WorstUnit: return "phi1";
    case Family::WorstUnitPeriod: return "phi2";
    case Family::WorstGroup: return "phi3";
    case Family::TotalExpected: return "phi4";
  }
  return "phi?";
}

void check_shapes(const Instance& inst) {
  int n = inst.num_nodes(), q = inst.horizon, nw = inst.scenarios.count();
  if (n <= 0 || q <= 0) throw std::invalid_argument("compile: instance has no nodes or no periods");
  if (inst.reach.n != n) throw std::invalid_argument("compile: reachability table size mismatch");
  if (nw <= 0 || (int)inst.scenarios.prob.size() != nw ||
      (int)inst.scenarios.demand.size() != nw)
    throw std::invalid_argument("compile: scenario set shape mismatch");
  for (const auto& dw : inst.scenarios.demand) {
    if ((int)dw.size() != n) throw std::invalid_argument("compile: demand node dimension mismatch");
    for (const auto& di : dw)
      if ((int)di.size() != q) throw std::invalid_argument("compile: demand period dimension mismatch");
  }
  const auto& pr = inst.profile;
  if ((int)pr.initial_stock.size() != n || (int)pr.max_deliveries.size() != n ||
      (int)pr.share_fraction.size() != n || (int)pr.max_shipment.size() != n ||
      (int)pr.storage_cap.size() != n)
    throw std::invalid_argument("compile: capacity profile size mismatch");
  if (inst.extra.amount.size() != inst.network.regions.size())
    throw std::invalid_argument("compile: extra stock schedule region count mismatch");
  for (const auto& ak : inst.extra.amount)
    if ((int)ak.size() != q)
      throw std::invalid_argument("compile: extra stock schedule period dimension mismatch");
  if (!inst.receipts.empty()) {
    if ((int)inst.receipts.size() != n)
      throw std::invalid_argument("compile: receipts node dimension mismatch");
    for (const auto& ri : inst.receipts)
      if ((int)ri.size() != q)
        throw std::invalid_argument("compile: receipts period dimension mismatch");
  }
}

// Index structures and data-derived bounds shared by the whole build.
struct Prep {
  int n = 0, q = 0, nw = 0, K = 0, np = 0;
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::int64_t> lag;                 // per pair
  std::vector<std::vector<int>> out_pairs;       // node-1 -> pair ids, dest ascending
  std::vector<std::vector<int>> in_pairs;        // node-1 -> pair ids, source ascending
  std::vector<std::vector<int>> members;         // region -> sorted node ids
  std::vector<std::vector<int>> member_regions;  // node-1 -> region indices
  std::vector<char> exempt;                      // node-1 -> may relay immediately

  std::vector<std::vector<std::int64_t>> rec_cum;  // [i-1][t-1] receipts through t
  std::vector<std::vector<std::int64_t>> dmax;     // [i-1][t]   sent through t, upper bound
  std::vector<std::vector<std::int64_t>> mplus;    // [i-1][t-1] excess-stock cap
  std::vector<std::vector<int>> out_unfixed;       // [i-1][t-1] out pairs still usable at t
  std::vector<std::vector<int>> in_unfixed;        // [i-1][t-1] in pairs still usable at t
};

Prep prepare(const Instance& inst, const CompileOptions& opts) {
  Prep P;
  P.n = inst.num_nodes();
  P.q = inst.horizon;
  P.nw = inst.scenarios.count();
  P.K = (int)inst.network.regions.size();
  P.pairs = inst.reach.pairs();
  P.np = (int)P.pairs.size();

  P.lag.resize((size_t)P.np);
  P.out_pairs.assign((size_t)P.n, {});
  P.in_pairs.assign((size_t)P.n, {});
  for (int p = 0; p < P.np; ++p) {
    auto [i, j] = P.pairs[(size_t)p];
    P.lag[(size_t)p] = shipping_lag(inst.reach.at(i, j).length);
    P.out_pairs[(size_t)(i - 1)].push_back(p);
    P.in_pairs[(size_t)(j - 1)].push_back(p);
  }

  P.members.resize((size_t)P.K);
  P.member_regions.assign((size_t)P.n, {});
  for (int k = 0; k < P.K; ++k) {
    auto ms = inst.network.regions[(size_t)k];
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    P.members[(size_t)k] = ms;
    for (int id : ms) P.member_regions[(size_t)(id - 1)].push_back(k);
  }

  P.exempt.assign((size_t)P.n, 0);
  for (int id : inst.relay_exempt)
    if (id >= 1 && id <= P.n) P.exempt[(size_t)(id - 1)] = 1;

  P.rec_cum.assign((size_t)P.n, std::vector<std::int64_t>((size_t)P.q, 0));
  if (!inst.receipts.empty())
    for (int i = 0; i < P.n; ++i) {
      std::int64_t c = 0;
      for (int t = 0; t < P.q; ++t) {
        c += inst.receipts[(size_t)i][(size_t)t];
        P.rec_cum[(size_t)i][(size_t)t] = c;
      }
    }

  P.out_unfixed.assign((size_t)P.n, std::vector<int>((size_t)P.q, 0));
  P.in_unfixed.assign((size_t)P.n, std::vector<int>((size_t)P.q, 0));
  for (int p = 0; p < P.np; ++p) {
    auto [i, j] = P.pairs[(size_t)p];
    for (int t = 1; t + P.lag[(size_t)p] <= P.q; ++t) {
      P.out_unfixed[(size_t)(i - 1)][(size_t)(t - 1)]++;
      P.in_unfixed[(size_t)(j - 1)][(size_t)(t - 1)]++;
    }
  }

  // Most units node i could have shipped out through period t: each period at
  // most min(delivery cap, open destinations) deliveries of max shipment size.
  P.dmax.assign((size_t)P.n, std::vector<std::int64_t>((size_t)(P.q + 1), 0));
  for (int i = 1; i <= P.n; ++i) {
    const auto& md = inst.profile.max_deliveries[(size_t)(i - 1)];
    std::int64_t g = inst.profile.max_shipment[(size_t)(i - 1)];
    for (int t = 1; t <= P.q; ++t) {
      std::int64_t dl = opts.no_redistribution ? 0 : P.out_unfixed[(size_t)(i - 1)][(size_t)(t - 1)];
      if (md && *md < dl) dl = *md;
      P.dmax[(size_t)(i - 1)][(size_t)t] = P.dmax[(size_t)(i - 1)][(size_t)(t - 1)] + dl * g;
    }
  }

  // Excess stock can never exceed everything that could be on hand: initial
  // stock, extra-stock arrivals, shipment arrivals and exogenous receipts.
  // A finite storage cap lowers that further.
  std::vector<std::vector<std::int64_t>> amount_cum((size_t)P.K,
                                                    std::vector<std::int64_t>((size_t)P.q, 0));
  for (int k = 0; k < P.K; ++k) {
    std::int64_t c = 0;
    for (int t = 0; t < P.q; ++t) {
      c += inst.extra.amount[(size_t)k][(size_t)t];
      amount_cum[(size_t)k][(size_t)t] = c;
    }
  }
  P.mplus.assign((size_t)P.n, std::vector<std::int64_t>((size_t)P.q, 0));
  for (int i = 1; i <= P.n; ++i) {
    for (int t = 1; t <= P.q; ++t) {
      std::int64_t nat = inst.profile.initial_stock[(size_t)(i - 1)] +
                         P.rec_cum[(size_t)(i - 1)][(size_t)(t - 1)];
      for (int k : P.member_regions[(size_t)(i - 1)]) nat += amount_cum[(size_t)k][(size_t)(t - 1)];
      if (!opts.no_redistribution)
        for (int p : P.in_pairs[(size_t)(i - 1)]) {
          auto [src, dst] = P.pairs[(size_t)p];
          (void)dst;
          nat += inst.profile.max_shipment[(size_t)(src - 1)] * max0(t - P.lag[(size_t)p]);
        }
      const auto& cap = inst.profile.storage_cap[(size_t)(i - 1)];
      if (cap && *cap < nat) nat = *cap;
      P.mplus[(size_t)(i - 1)][(size_t)(t - 1)] = nat;
    }
  }
  return P;
}

// Sorted copy of the fairness groups; group order follows the network, member
// order is ascending ids.
std::vector<std::vector<int>> sorted_partition(const DistributionNetwork& net) {
  std::vector<std::vector<int>> gs = net.partition;
  for (auto& g : gs) std::sort(g.begin(), g.end());
  return gs;
}

Compiled compile_core(const Instance& inst, Family family, const std::vector<Rat64>* regret_base,
                      const CompileOptions& opts) {
  check_shapes(inst);
  const bool regret = regret_base != nullptr;
  std::vector<std::vector<int>> groups;
  if (family == Family::WorstGroup) {
    groups = sorted_partition(inst.network);
    if (groups.empty())
      throw std::invalid_argument("compile: the group objective needs a fairness partition");
  }
  Prep P = prepare(inst, opts);
  const int n = P.n, q = P.q, nw = P.nw, K = P.K;
  const auto& prob = inst.scenarios.prob;
  const auto& demand = inst.scenarios.demand;
  const auto& stock = inst.profile.initial_stock;

  if (regret && (int)regret_base->size() != nw)
    throw std::invalid_argument("compile: one baseline value per scenario required");

  VariableIndex idx;
  idx.n = n;
  idx.q = q;
  idx.nw = nw;
  idx.region_count = K;
  idx.pairs = P.pairs;
  idx.x.assign((size_t)n * n * q, -1);
  idx.y.assign((size_t)n * n * q, -1);
  idx.s.assign((size_t)n * K * q, -1);
  idx.h.assign((size_t)n * q * nw, -1);
  idx.b.assign((size_t)n * q * nw, -1);
  idx.ncdp.assign((size_t)n * q * nw, -1);

  Model m;
  m.name = std::string(family_tag(family)) + (regret ? "_regret" : "");

  size_t total_members = 0;
  for (int k = 0; k < K; ++k) total_members += P.members[(size_t)k].size();
  {
    size_t ncols = 2 * (size_t)q * P.np + (size_t)q * total_members + 3 * (size_t)n * q * nw + 1;
    m.var_names.reserve(ncols);
    m.var_kinds.reserve(ncols);
    m.lb.reserve(ncols);
    m.ub.reserve(ncols);
    m.obj.reserve(ncols);
  }

  const Rat64 zero(0), one(1), neg(-1);

  // Shipment counts and their on/off flags. Pairs whose shipment could not
  // arrive inside the horizon keep their columns pinned to zero, so the column
  // layout is independent of lags.
  for (int t = 1; t <= q; ++t)
    for (int p = 0; p < P.np; ++p) {
      auto [i, j] = P.pairs[(size_t)p];
      bool fixed = opts.no_redistribution || t + P.lag[(size_t)p] > q;
      std::int64_t g = inst.profile.max_shipment[(size_t)(i - 1)];
      idx.x[(size_t)((t - 1) * n * n + (i - 1) * n + (j - 1))] =
          m.add_int(row_id("x", {i, j, t}), Bound::at(zero), Bound::at(Rat64(fixed ? 0 : g)));
    }
  for (int t = 1; t <= q; ++t)
    for (int p = 0; p < P.np; ++p) {
      auto [i, j] = P.pairs[(size_t)p];
      bool fixed = opts.no_redistribution || t + P.lag[(size_t)p] > q;
      int col = fixed ? m.add_var(row_id("y", {i, j, t}), VarKind::Binary, Bound::at(zero),
                                  Bound::at(zero))
                      : m.add_bin(row_id("y", {i, j, t}));
      idx.y[(size_t)((t - 1) * n * n + (i - 1) * n + (j - 1))] = col;
    }

  // Extra-stock placement. The column exists for every member and period; a
  // period without extra stock just carries a zero upper bound.
  for (int t = 1; t <= q; ++t)
    for (int k = 0; k < K; ++k) {
      std::int64_t amt = inst.extra.amount[(size_t)k][(size_t)(t - 1)];
      for (int i : P.members[(size_t)k])
        idx.s[(size_t)(((t - 1) * K + k) * n + (i - 1))] =
            m.add_int(row_id("s", {i, k + 1, t}), Bound::at(zero), Bound::at(Rat64(amt)));
    }

  // Per node, period and scenario: the excess stock available for sharing, its
  // sign flag, and the positive part of the non-covered demand.
  auto mminus_of = [&](int i, int t, int w) {
    return max0(demand[(size_t)w][(size_t)(i - 1)][(size_t)(t - 1)] +
                P.dmax[(size_t)(i - 1)][(size_t)(t - 1)] - stock[(size_t)(i - 1)] -
                P.rec_cum[(size_t)(i - 1)][(size_t)(t - 1)]);
  };
  auto ncdub_of = [&](int i, int t, int w) {
    return max0(demand[(size_t)w][(size_t)(i - 1)][(size_t)(t - 1)] +
                P.dmax[(size_t)(i - 1)][(size_t)t] - stock[(size_t)(i - 1)] -
                P.rec_cum[(size_t)(i - 1)][(size_t)(t - 1)]);
  };
  for (int t = 1; t <= q; ++t)
    for (int i = 1; i <= n; ++i) {
      std::int64_t mp = P.mplus[(size_t)(i - 1)][(size_t)(t - 1)];
      for (int w = 0; w < nw; ++w) {
        size_t cell = (size_t)(((t - 1) * n + (i - 1)) * nw + w);
        idx.h[cell] = m.add_cont(row_id("H", {i, t, w + 1}), Bound::at(zero), Bound::at(Rat64(mp)));
        if (mp == 0)
          idx.b[cell] = m.add_var(row_id("b", {i, t, w + 1}), VarKind::Binary, Bound::at(zero),
                                  Bound::at(zero));
        else if (mminus_of(i, t, w) == 0)
          idx.b[cell] = m.add_var(row_id("b", {i, t, w + 1}), VarKind::Binary, Bound::at(one),
                                  Bound::at(one));
        else
          idx.b[cell] = m.add_bin(row_id("b", {i, t, w + 1}));
        std::int64_t nub = ncdub_of(i, t, w);
        idx.ncdp[cell] =
            m.add_cont(row_id("ncdp", {i, t, w + 1}), Bound::at(zero), Bound::at(Rat64(nub)));
      }
    }

  if (!regret && family != Family::TotalExpected)
    idx.eta = m.add_cont("eta", Bound::at(zero), Bound::none());
  if (regret) {
    Rat64 lo = zero;
    for (const Rat64& b : *regret_base)
      if (-b < lo) lo = -b;
    idx.alpha = m.add_cont("alpha", Bound::at(lo), Bound::none());
  }

  // Reserve the row and term arenas. These are upper bounds on what the
  // emission below produces; without them the arena's growth doubling would
  // briefly hold two copies of a multi-gigabyte array at large scale.
  {
    size_t rows_ub = 1, terms_ub = 1;
    for (int i = 1; i <= n; ++i) {
      size_t outdeg = P.out_pairs[(size_t)(i - 1)].size();
      for (int t = 1; t <= q; ++t) {
        size_t xin = 0, xout = 0;
        if (!opts.no_redistribution) {
          for (int p : P.in_pairs[(size_t)(i - 1)]) xin += (size_t)max0(t - P.lag[(size_t)p]);
          for (int p : P.out_pairs[(size_t)(i - 1)])
            xout += (size_t)max0(std::min<std::int64_t>(t, q - P.lag[(size_t)p]));
        }
        size_t bal = 1 + P.member_regions[(size_t)(i - 1)].size() * (size_t)t + xin + xout;
        rows_ub += 6 * (size_t)nw;
        terms_ub += (size_t)nw * (3 * bal + outdeg + 8);
      }
    }
    for (int t = 1; t <= q; ++t) {
      size_t u = 0;
      for (int p = 0; p < P.np; ++p)
        if (t + P.lag[(size_t)p] <= q) ++u;
      rows_ub += 2 * u + (size_t)n + (size_t)K;
      terms_ub += 5 * u + total_members;
    }
    if (!opts.no_redistribution)
      for (int t = 1; t <= q; ++t)
        for (int j = 1; j <= n; ++j)
          if (!P.exempt[(size_t)(j - 1)]) {
            size_t a = (size_t)P.in_unfixed[(size_t)(j - 1)][(size_t)(t - 1)];
            size_t b = (size_t)P.out_unfixed[(size_t)(j - 1)][(size_t)(t - 1)];
            rows_ub += a * b;
            terms_ub += 2 * a * b;
          }
    size_t cells = (size_t)n * q * nw;
    size_t L = groups.size();
    if (!regret) {
      if (family == Family::WorstUnit) rows_ub += (size_t)n, terms_ub += (size_t)n + cells;
      if (family == Family::WorstUnitPeriod)
        rows_ub += (size_t)n * q, terms_ub += (size_t)n * q + cells;
      if (family == Family::WorstGroup) rows_ub += L, terms_ub += L + cells;
    } else {
      switch (family) {
        case Family::WorstUnit: rows_ub += (size_t)n * nw, terms_ub += (size_t)n * nw + cells; break;
        case Family::WorstUnitPeriod: rows_ub += cells, terms_ub += 2 * cells; break;
        case Family::WorstGroup: rows_ub += L * nw, terms_ub += L * nw + cells; break;
        case Family::TotalExpected: rows_ub += (size_t)nw, terms_ub += (size_t)nw + cells; break;
      }
    }
    m.rows.reserve(rows_ub);
    m.terms.reserve(terms_ub);
  }

  auto term = [&m](int var, const Rat64& c) {
    if (!(c == Rat64(0))) m.row_term(var, c);
  };

  // Cumulative stock-movement terms shared by the excess and shortfall rows.
  // sgn +1 emits -sum s -sum x_in +sum x_out (excess side), sgn -1 the
  // opposite (shortfall side). out_hi caps the outbound window: t-1 for
  // excess (this period's sending happens after the excess is measured),
  // t for the shortfall. Pinned shipment columns contribute nothing and are
  // skipped to keep the arena small.
  auto balance = [&](int i, int t, int sgn, int out_hi) {
    Rat64 cin = sgn > 0 ? neg : one;
    Rat64 cout = sgn > 0 ? one : neg;
    for (int k : P.member_regions[(size_t)(i - 1)])
      for (int t2 = 1; t2 <= t; ++t2) term(idx.s_at(i, k, t2), cin);
    if (opts.no_redistribution) return;
    for (int p : P.in_pairs[(size_t)(i - 1)]) {
      auto [src, dst] = P.pairs[(size_t)p];
      (void)dst;
      int hi = (int)std::min<std::int64_t>(t - P.lag[(size_t)p], q);
      for (int t2 = 1; t2 <= hi; ++t2) term(idx.x_at(src, i, t2), cin);
    }
    for (int p : P.out_pairs[(size_t)(i - 1)]) {
      auto [src, dst] = P.pairs[(size_t)p];
      (void)src;
      int hi = (int)std::min<std::int64_t>(out_hi, q - P.lag[(size_t)p]);
      for (int t2 = 1; t2 <= hi; ++t2) term(idx.x_at(i, dst, t2), cout);
    }
  };

  for (int t = 1; t <= q; ++t)
    for (int i = 1; i <= n; ++i) {
      std::int64_t s0 = stock[(size_t)(i - 1)];
      std::int64_t rec = P.rec_cum[(size_t)(i - 1)][(size_t)(t - 1)];
      std::int64_t mp = P.mplus[(size_t)(i - 1)][(size_t)(t - 1)];
      const Rat64& gamma = inst.profile.share_fraction[(size_t)(i - 1)];
      for (int w = 0; w < nw; ++w) {
        std::int64_t d = demand[(size_t)w][(size_t)(i - 1)][(size_t)(t - 1)];
        int hv = idx.h_at(i, t, w), bv = idx.b_at(i, t, w), pv = idx.ncdp_at(i, t, w);

        // H >= available - demanded. With H pinned at zero (no storage or no
        // possible stock) this is what forces the balance nonpositive.
        m.add_row(row_id("hge", {i, t, w + 1}), Sense::Ge, Rat64(s0 + rec - d));
        term(hv, one);
        balance(i, t, +1, t - 1);

        if (mp > 0) {
          std::int64_t mm = mminus_of(i, t, w);
          // H <= available - demanded + M(1-b); when the balance cannot go
          // negative the flag is pinned to one and the pair collapses to
          // equality.
          m.add_row(row_id("hub", {i, t, w + 1}), Sense::Le, Rat64(s0 + rec - d + mm));
          term(hv, one);
          balance(i, t, +1, t - 1);
          if (mm > 0) {
            term(bv, Rat64(mm));
            m.add_row(row_id("hbnd", {i, t, w + 1}), Sense::Le, zero);
            term(hv, one);
            term(bv, Rat64(-mp));
          }
        }

        // Positive part of the non-covered demand; omitted when the data
        // already proves the shortfall cannot be positive.
        if (ncdub_of(i, t, w) > 0) {
          m.add_row(row_id("ncd", {i, t, w + 1}), Sense::Ge, Rat64(d - s0 - rec));
          term(pv, one);
          balance(i, t, -1, t);
        }

        // Outbound shipping is capped by the shareable slice of the excess,
        // scenario by scenario.
        if (!opts.no_redistribution && P.out_unfixed[(size_t)(i - 1)][(size_t)(t - 1)] > 0) {
          m.add_row(row_id("c1", {i, t, w + 1}), Sense::Le, zero);
          for (int p : P.out_pairs[(size_t)(i - 1)])
            if (t + P.lag[(size_t)p] <= q) {
              auto [src, dst] = P.pairs[(size_t)p];
              (void)src;
              term(idx.x_at(i, dst, t), one);
            }
          term(hv, -gamma);
        }

        if (inst.profile.storage_cap[(size_t)(i - 1)]) {
          m.add_row(row_id("c6", {i, t, w + 1}), Sense::Le,
                    Rat64(*inst.profile.storage_cap[(size_t)(i - 1)]));
          term(hv, one);
        }
      }
    }

  if (!opts.no_redistribution) {
    // Shipment size bounds tied to the on/off flag.
    for (int t = 1; t <= q; ++t)
      for (int p = 0; p < P.np; ++p) {
        if (t + P.lag[(size_t)p] > q) continue;
        auto [i, j] = P.pairs[(size_t)p];
        int xv = idx.x_at(i, j, t), yv = idx.y_at(i, j, t);
        m.add_row(row_id("c2l", {i, j, t}), Sense::Ge, zero);
        term(xv, one);
        term(yv, neg);
        m.add_row(row_id("c2u", {i, j, t}), Sense::Le, zero);
        term(xv, one);
        term(yv, Rat64(-inst.profile.max_shipment[(size_t)(i - 1)]));
      }
    // Per-period delivery count cap.
    for (int t = 1; t <= q; ++t)
      for (int i = 1; i <= n; ++i) {
        const auto& md = inst.profile.max_deliveries[(size_t)(i - 1)];
        if (!md || P.out_unfixed[(size_t)(i - 1)][(size_t)(t - 1)] == 0) continue;
        m.add_row(row_id("c3", {i, t}), Sense::Le, Rat64(*md));
        for (int p : P.out_pairs[(size_t)(i - 1)])
          if (t + P.lag[(size_t)p] <= q) {
            auto [src, dst] = P.pairs[(size_t)p];
            (void)src;
            term(idx.y_at(i, dst, t), one);
          }
      }
  }

  // Extra stock must be distributed inside its region in the arrival period,
  // either exactly or at most, depending on the sharing mode.
  for (int t = 1; t <= q; ++t)
    for (int k = 0; k < K; ++k) {
      std::int64_t amt = inst.extra.amount[(size_t)k][(size_t)(t - 1)];
      if (amt <= 0) continue;
      m.add_row(row_id("c4", {k + 1, t}),
                inst.share_mode == ShareMode::Exact ? Sense::Eq : Sense::Le, Rat64(amt));
      for (int i : P.members[(size_t)k]) term(idx.s_at(i, k, t), one);
    }

  // A node that receives a shipment cannot send one in the same period,
  // unless it is a designated relay point.
  if (!opts.no_redistribution)
    for (int t = 1; t <= q; ++t)
      for (int j = 1; j <= n; ++j) {
        if (P.exempt[(size_t)(j - 1)]) continue;
        for (int pi : P.in_pairs[(size_t)(j - 1)]) {
          if (t + P.lag[(size_t)pi] > q) continue;
          int i = P.pairs[(size_t)pi].first;
          for (int po : P.out_pairs[(size_t)(j - 1)]) {
            if (t + P.lag[(size_t)po] > q) continue;
            int kdst = P.pairs[(size_t)po].second;
            m.add_row(row_id("c5", {i, j, kdst, t}), Sense::Le, one);
            term(idx.y_at(i, j, t), one);
            term(idx.y_at(j, kdst, t), one);
          }
        }
      }

  // Objective: either the plain family (epigraph over its inner maxima) or
  // the worst regret against the per-scenario baselines.
  if (!regret) {
    switch (family) {
      case Family::TotalExpected:
        for (int t = 1; t <= q; ++t)
          for (int i = 1; i <= n; ++i)
            for (int w = 0; w < nw; ++w) m.set_obj(idx.ncdp_at(i, t, w), prob[(size_t)w]);
        break;
      case Family::WorstUnit:
        for (int i = 1; i <= n; ++i) {
          m.add_row(row_id("epi", {i}), Sense::Ge, zero);
          term(idx.eta, one);
          for (int t = 1; t <= q; ++t)
            for (int w = 0; w < nw; ++w) term(idx.ncdp_at(i, t, w), -prob[(size_t)w]);
        }
        m.set_obj(idx.eta, one);
        break;
      case Family::WorstUnitPeriod:
        for (int i = 1; i <= n; ++i)
          for (int t = 1; t <= q; ++t) {
            m.add_row(row_id("epi", {i, t}), Sense::Ge, zero);
            term(idx.eta, one);
            for (int w = 0; w < nw; ++w) term(idx.ncdp_at(i, t, w), -prob[(size_t)w]);
          }
        m.set_obj(idx.eta, one);
        break;
      case Family::WorstGroup:
        for (int l = 0; l < (int)groups.size(); ++l) {
          m.add_row(row_id("epi", {l + 1}), Sense::Ge, zero);
          term(idx.eta, one);
          for (int i : groups[(size_t)l])
            for (int t = 1; t <= q; ++t)
              for (int w = 0; w < nw; ++w) term(idx.ncdp_at(i, t, w), -prob[(size_t)w]);
        }
        m.set_obj(idx.eta, one);
        break;
    }
  } else {
    // alpha >= (family value under scenario w alone) - (best value achievable
    // under w alone), expanded per inner-max element. Probabilities drop out:
    // the single-scenario value weights its scenario with one.
    const std::vector<Rat64>& base = *regret_base;
    switch (family) {
      case Family::WorstUnit:
        for (int i = 1; i <= n; ++i)
          for (int w = 0; w < nw; ++w) {
            m.add_row(row_id("regret", {i, w + 1}), Sense::Ge, -base[(size_t)w]);
            term(idx.alpha, one);
            for (int t = 1; t <= q; ++t) term(idx.ncdp_at(i, t, w), neg);
          }
        break;
      case Family::WorstUnitPeriod:
        for (int i = 1; i <= n; ++i)
          for (int t = 1; t <= q; ++t)
            for (int w = 0; w < nw; ++w) {
              m.add_row(row_id("regret", {i, t, w + 1}), Sense::Ge, -base[(size_t)w]);
              term(idx.alpha, one);
              term(idx.ncdp_at(i, t, w), neg);
            }
        break;
      case Family::WorstGroup:
        for (int l = 0; l < (int)groups.size(); ++l)
          for (int w = 0; w < nw; ++w) {
            m.add_row(row_id("regret", {l + 1, w + 1}), Sense::Ge, -base[(size_t)w]);
            term(idx.alpha, one);
            for (int i : groups[(size_t)l])
              for (int t = 1; t <= q; ++t) term(idx.ncdp_at(i, t, w), neg);
          }
        break;
      case Family::TotalExpected:
        for (int w = 0; w < nw; ++w) {
          m.add_row(row_id("regret", {w + 1}), Sense::Ge, -base[(size_t)w]);
          term(idx.alpha, one);
          for (int i = 1; i <= n; ++i)
            for (int t = 1; t <= q; ++t) term(idx.ncdp_at(i, t, w), neg);
        }
        break;
    }
    m.set_obj(idx.alpha, one);
  }

  return {std::move(m), std::move(idx)};
}

}  // namespace

Compiled compile(const Instance& inst, const Objective& obj, const CompileOptions& opts) {
  if (obj.regret)
    throw std::invalid_argument("compile: regret objectives go through compile_regret");
  return compile_core(inst, obj.family, nullptr, opts);
}

CompiledRegret compile_regret(const Instance& inst, Family family,
                              const milp::SolveOptions& solve_options, const CompileOptions& opts) {
  check_shapes(inst);
  int nw = inst.scenarios.count();
  RegretBaselines base;
  base.value.reserve((size_t)nw);
  base.stats.reserve((size_t)nw);
  for (int w = 0; w < nw; ++w) {
    Instance single = inst;
    single.scenarios.names = {inst.scenarios.names[(size_t)w]};
    single.scenarios.prob = {Rat64(1)};
    single.scenarios.demand = {inst.scenarios.demand[(size_t)w]};
    Compiled restricted = compile_core(single, family, nullptr, opts);
    milp::Solution sol = milp::solve(restricted.model, solve_options);
    if (sol.status != milp::SolveStatus::Optimal)
      throw milp::SolverError("regret baseline for scenario '" + inst.scenarios.names[(size_t)w] +
                              "' ended " + milp::to_string(sol.status) +
                              "; a proven optimum is required");
    base.value.push_back(from_big(sol.objective));
    base.stats.push_back(sol.stats);
  }
  Compiled full = compile_core(inst, family, &base.value, opts);
  return {std::move(full.model), std::move(full.index), std::move(base)};
}

ModelStatistics model_statistics(const milp::Model& model) {
  ModelStatistics st;
  for (const auto& r : model.rows) {
    size_t cut = r.name.find('_');
    st.rows_by_tag[cut == std::string::npos ? r.name : r.name.substr(0, cut)]++;
  }
  for (int j = 0; j < model.num_vars(); ++j) {
    switch (model.var_kinds[(size_t)j]) {
      case VarKind::Integer: st.integer_columns++; break;
      case VarKind::Binary: st.binary_columns++; break;
      case VarKind::Continuous: st.continuous_columns++; break;
    }
    if (model.lb[(size_t)j].finite && model.ub[(size_t)j].finite &&
        model.lb[(size_t)j].value == model.ub[(size_t)j].value)
      st.fixed_columns++;
  }
  return st;
}

void write_index_sidecar(const VariableIndex& idx, std::ostream& os) {
  os << "{\"nodes\":" << idx.n << ",\"periods\":" << idx.q << ",\"scenarios\":" << idx.nw
     << ",\"regions\":" << idx.region_count << ",\"columns\":{";
  auto pair_block = [&](const char* key, const std::vector<int>& layout) {
    os << '"' << key << "\":[";
    bool first = true;
    for (int t = 1; t <= idx.q; ++t)
      for (const auto& [i, j] : idx.pairs) {
        int col = layout[(size_t)((t - 1) * idx.n * idx.n + (i - 1) * idx.n + (j - 1))];
        if (col < 0) continue;
        os << (first ? "" : ",") << "\n[" << i << ',' << j << ',' << t << ',' << col << ']';
        first = false;
      }
    os << "]";
  };
  pair_block("x", idx.x);
  os << ',';
  pair_block("y", idx.y);
  os << ",\"s\":[";
  {
    bool first = true;
    for (int t = 1; t <= idx.q; ++t)
      for (int k = 0; k < idx.region_count; ++k)
        for (int i = 1; i <= idx.n; ++i) {
          int col = idx.s_at(i, k, t);
          if (col < 0) continue;
          os << (first ? "" : ",") << "\n[" << i << ',' << k + 1 << ',' << t << ',' << col << ']';
          first = false;
        }
    os << "]";
  }
  auto cell_block = [&](const char* key, const std::vector<int>& layout) {
    os << '"' << key << "\":[";
    bool first = true;
    for (int t = 1; t <= idx.q; ++t)
      for (int i = 1; i <= idx.n; ++i)
        for (int w = 0; w < idx.nw; ++w) {
          int col = layout[(size_t)(((t - 1) * idx.n + (i - 1)) * idx.nw + w)];
          if (col < 0) continue;
          os << (first ? "" : ",") << "\n[" << i << ',' << t << ',' << w + 1 << ',' << col << ']';
          first = false;
        }
    os << "]";
  };
  os << ',';
  cell_block("H", idx.h);
  os << ',';
  cell_block("b", idx.b);
  os << ',';
  cell_block("ncdp", idx.ncdp);
  os << ",\"eta\":" << idx.eta << ",\"alpha\":" << idx.alpha << "}}\n";
}

}  // namespace stockflow
