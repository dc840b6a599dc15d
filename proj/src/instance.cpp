#include "stockflow/instance.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace stockflow {

namespace {

std::string node_tag(int id) { return "node " + std::to_string(id); }

}  // namespace

std::vector<Finding> validate_instance(const Instance& inst) {
  std::vector<Finding> out = validate_network(inst.network);
  for (Finding& f : out) f.message = "network: " + f.message;
  auto fatal = [&](std::string m) { out.push_back({true, std::move(m)}); };
  auto warn = [&](std::string m) { out.push_back({false, std::move(m)}); };

  const int n = inst.num_nodes();
  const int q = inst.horizon;
  if (q < 1) fatal("horizon must be at least 1");
  if (inst.reach.n != n) fatal("reachability table does not match the network");

  const CapacityProfile& pr = inst.profile;
  if ((int)pr.initial_stock.size() != n || (int)pr.max_deliveries.size() != n ||
      (int)pr.share_fraction.size() != n || (int)pr.max_shipment.size() != n ||
      (int)pr.storage_cap.size() != n) {
    fatal("capacity profile does not cover every node");
  } else {
    for (int i = 0; i < n; ++i) {
      if (pr.initial_stock[(size_t)i] < 0) fatal(node_tag(i + 1) + ": negative initial stock");
      if (pr.share_fraction[(size_t)i] < Rat64(0) || Rat64(1) < pr.share_fraction[(size_t)i])
        fatal(node_tag(i + 1) + ": share fraction outside [0, 1]");
      if (pr.max_shipment[(size_t)i] < 1)
        fatal(node_tag(i + 1) + ": max shipment size must be at least 1");
      if (pr.max_deliveries[(size_t)i] && *pr.max_deliveries[(size_t)i] < 0)
        fatal(node_tag(i + 1) + ": negative delivery cap");
      if (pr.storage_cap[(size_t)i] && *pr.storage_cap[(size_t)i] < 0)
        fatal(node_tag(i + 1) + ": negative storage cap");
      if (pr.storage_cap[(size_t)i] && *pr.storage_cap[(size_t)i] < pr.initial_stock[(size_t)i])
        warn(node_tag(i + 1) + ": storage cap below initial stock; the excess-stock cap " +
             "can be infeasible in period 1");
    }
  }

  if ((int)inst.extra.amount.size() != (int)inst.network.regions.size()) {
    fatal("extra-stock schedule does not cover every sharing region");
  } else {
    for (size_t k = 0; k < inst.extra.amount.size(); ++k) {
      if ((int)inst.extra.amount[k].size() != q) {
        fatal("extra-stock schedule for region #" + std::to_string(k + 1) +
              " does not cover every period");
        continue;
      }
      for (std::int64_t v : inst.extra.amount[k])
        if (v < 0) fatal("negative extra stock in region #" + std::to_string(k + 1));
    }
  }

  const ScenarioSet& sc = inst.scenarios;
  if (sc.count() == 0) fatal("at least one scenario is required");
  if ((int)sc.prob.size() != sc.count() || (int)sc.demand.size() != sc.count()) {
    fatal("scenario names, probabilities and demands disagree in size");
  } else {
    std::set<std::string> seen;
    Rat64 total(0);
    for (int w = 0; w < sc.count(); ++w) {
      if (sc.names[(size_t)w].empty()) fatal("scenario #" + std::to_string(w + 1) + " is unnamed");
      if (!seen.insert(sc.names[(size_t)w]).second)
        fatal("duplicate scenario name '" + sc.names[(size_t)w] + "'");
      const Rat64& p = sc.prob[(size_t)w];
      if (p < Rat64(0) || Rat64(1) < p)
        fatal("probability of scenario '" + sc.names[(size_t)w] + "' outside [0, 1]");
      total = total + p;
      if ((int)sc.demand[(size_t)w].size() != n) {
        fatal("demand of scenario '" + sc.names[(size_t)w] + "' does not cover every node");
        continue;
      }
      for (int i = 0; i < n; ++i) {
        if ((int)sc.demand[(size_t)w][(size_t)i].size() != q) {
          fatal("demand of scenario '" + sc.names[(size_t)w] + "' at " + node_tag(i + 1) +
                " does not cover every period");
          break;
        }
        for (std::int64_t v : sc.demand[(size_t)w][(size_t)i])
          if (v < 0) fatal("negative demand in scenario '" + sc.names[(size_t)w] + "'");
      }
    }
    if (sc.count() > 0 && !(total == Rat64(1)))
      fatal("probabilities sum to " + total.decimal_str() + ", expected 1");
  }

  if (!inst.receipts.empty()) {
    if ((int)inst.receipts.size() != n) {
      fatal("receipts do not cover every node");
    } else {
      for (int i = 0; i < n; ++i) {
        if ((int)inst.receipts[(size_t)i].size() != q) {
          fatal("receipts at " + node_tag(i + 1) + " do not cover every period");
          break;
        }
        for (std::int64_t v : inst.receipts[(size_t)i])
          if (v < 0) fatal("negative receipt at " + node_tag(i + 1));
      }
    }
  }

  for (int id : inst.relay_exempt)
    if (id < 1 || id > n) fatal("relay exemption names unknown " + node_tag(id));

  return out;
}

std::vector<std::vector<std::int64_t>> estimate_daily_demand_from_cumulative(
    const std::vector<std::vector<std::int64_t>>& cumulative, int stay_length) {
  if (stay_length < 1) throw std::invalid_argument("stay length must be positive");
  std::vector<std::vector<std::int64_t>> demand(cumulative.size());
  for (size_t i = 0; i < cumulative.size(); ++i) {
    const auto& cum = cumulative[i];
    std::vector<std::int64_t> adm(cum.size(), 0);
    std::int64_t prev = 0;
    for (size_t t = 0; t < cum.size(); ++t) {
      if (cum[t] < 0) throw std::invalid_argument("negative cumulative count");
      adm[t] = std::max<std::int64_t>(0, cum[t] - prev);
      prev = cum[t];
    }
    demand[i].assign(cum.size(), 0);
    for (size_t t = 0; t < cum.size(); ++t) {
      size_t lo = t + 1 >= (size_t)stay_length ? t + 1 - (size_t)stay_length : 0;
      for (size_t s = lo; s <= t; ++s) demand[i][t] += adm[s];
    }
  }
  return demand;
}

std::vector<std::int64_t> split_extra_stock_by_population(std::int64_t total,
                                                          const std::vector<Rat64>& weights) {
  if (total < 0) throw std::invalid_argument("cannot split a negative total");
  if (weights.empty()) throw std::invalid_argument("no weights to split over");
  BigRat sum(0);
  for (const Rat64& w : weights) {
    if (w < Rat64(0)) throw std::invalid_argument("negative weight");
    sum += to_big(w);
  }
  if (sum == 0) throw std::invalid_argument("weights must not all be zero");

  const size_t n = weights.size();
  std::vector<std::int64_t> base(n, 0);
  std::vector<BigRat> rem(n);
  std::int64_t assigned = 0;
  for (size_t i = 0; i < n; ++i) {
    BigRat share = BigRat(total) * to_big(weights[i]) / sum;
    BigRat fl = boost::multiprecision::numerator(share) / boost::multiprecision::denominator(share);
    base[i] = fl.convert_to<std::int64_t>();
    rem[i] = share - fl;
    assigned += base[i];
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (rem[a] != rem[b]) return rem[b] < rem[a];
    if (!(weights[a] == weights[b])) return weights[b] < weights[a];
    return a < b;
  });
  for (std::int64_t k = 0; k < total - assigned; ++k) base[order[(size_t)k]] += 1;
  return base;
}

ScenarioSet generate_scenarios(const std::vector<std::vector<std::int64_t>>& real_demand,
                               const DistributionNetwork& network,
                               const ScenarioGenConfig& cfg) {
  const int n = network.num_nodes();
  if (n == 0) throw std::invalid_argument("empty network");
  if ((int)real_demand.size() != n)
    throw std::invalid_argument("real demand does not cover every node");
  const int q = (int)real_demand[0].size();
  if (q < 1) throw std::invalid_argument("real demand has no periods");
  for (int i = 0; i < n; ++i) {
    if ((int)real_demand[(size_t)i].size() != q)
      throw std::invalid_argument("real demand rows differ in length");
    for (std::int64_t v : real_demand[(size_t)i])
      if (v < 0) throw std::invalid_argument("negative real demand");
  }
  if (cfg.province_range_bound < Rat64(0))
    throw std::invalid_argument("province range bound must be nonnegative");
  if (cfg.zero_fix_support != 1 && cfg.zero_fix_support != 2)
    throw std::invalid_argument("zero-fix support must be 1 or 2");
  if (cfg.probabilities) {
    if (cfg.probabilities->size() != 3)
      throw std::invalid_argument("probability override needs exactly 3 entries");
    Rat64 s(0);
    for (const Rat64& p : *cfg.probabilities) {
      if (p < Rat64(0) || Rat64(1) < p)
        throw std::invalid_argument("probability outside [0, 1]");
      s = s + p;
    }
    if (!(s == Rat64(1))) throw std::invalid_argument("probabilities must sum to 1");
  }
  for (const Node& nd : network.nodes)
    if (nd.kind == NodeKind::Hospital && nd.province.empty())
      throw std::invalid_argument("hospital " + std::to_string(nd.id) + " has no province");

  std::mt19937_64 rng(cfg.seed);
  // 53-bit uniform in [0, 1); fixed mapping so streams reproduce everywhere.
  auto uniform = [&rng]() { return (double)(rng() >> 11) * 0x1.0p-53; };
  const double bound = cfg.province_range_bound.to_double();

  std::set<std::string> province_set;
  for (const Node& nd : network.nodes)
    if (nd.kind == NodeKind::Hospital) province_set.insert(nd.province);
  std::map<std::string, std::pair<double, double>> rates;  // minus, plus
  for (const std::string& prov : province_set) {
    double rminus = uniform() * bound;
    double rplus = uniform() * bound;
    rates[prov] = {rminus, rplus};
  }
  std::vector<double> own_minus((size_t)n, 0.0), own_plus((size_t)n, 0.0);
  for (const Node& nd : network.nodes) {
    if (nd.kind != NodeKind::Hospital) continue;
    const auto& [rminus, rplus] = rates[nd.province];
    own_minus[(size_t)(nd.id - 1)] = uniform() * rminus;
    own_plus[(size_t)(nd.id - 1)] = uniform() * rplus;
  }

  auto round_value = [&cfg](double x) -> std::int64_t {
    switch (cfg.rounding) {
      case DemandRounding::Floor: return (std::int64_t)std::floor(x);
      case DemandRounding::Ceil: return (std::int64_t)std::ceil(x);
      default: return (std::int64_t)std::floor(x + 0.5);  // ties up
    }
  };

  ScenarioSet out;
  out.names = {"Real", "Pessimistic", "Optimistic"};
  out.prob = cfg.probabilities ? *cfg.probabilities
                               : std::vector<Rat64>{Rat64(1, 3), Rat64(1, 3), Rat64(1, 3)};
  out.demand.assign(3, real_demand);
  for (const Node& nd : network.nodes) {
    if (nd.kind != NodeKind::Hospital) continue;  // centers keep real demand
    size_t i = (size_t)(nd.id - 1);
    for (int t = 0; t < q; ++t) {
      double d = (double)real_demand[i][(size_t)t];
      out.demand[1][i][(size_t)t] = round_value((1.0 + own_plus[i]) * d);
      out.demand[2][i][(size_t)t] = round_value((1.0 - own_minus[i]) * d);
    }
  }
  // Replacement draws come last so the rate stream is identical for every
  // support setting; scan order is scenario, then node, then period.
  for (int w : {1, 2}) {
    for (const Node& nd : network.nodes) {
      if (nd.kind != NodeKind::Hospital) continue;
      size_t i = (size_t)(nd.id - 1);
      for (int t = 0; t < q; ++t)
        if (out.demand[(size_t)w][i][(size_t)t] <= 0)
          out.demand[(size_t)w][i][(size_t)t] =
              cfg.zero_fix_support == 2 ? 1 + (std::int64_t)(rng() & 1) : 1;
    }
  }
  return out;
}

}  // namespace stockflow
