#include "stockflow/network.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>
#include <string>

namespace stockflow {

namespace {

bool ids_contiguous(const std::vector<Node>& nodes) {
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id != (int)i + 1) return false;
  return true;
}

// Rosters built in code often leave ids at 0; number them in list order.
void assign_ids_if_unset(std::vector<Node>& nodes) {
  bool all_unset = true;
  for (const Node& nd : nodes)
    if (nd.id != 0) all_unset = false;
  if (all_unset)
    for (size_t i = 0; i < nodes.size(); ++i) nodes[i].id = (int)i + 1;
}

void check_distance_matrix(int n, const std::vector<std::vector<Rat64>>& d) {
  if ((int)d.size() != n) throw std::invalid_argument("distance matrix row count != node count");
  for (int i = 0; i < n; ++i) {
    if ((int)d[(size_t)i].size() != n)
      throw std::invalid_argument("distance matrix is not square");
    if (!(d[(size_t)i][(size_t)i] == Rat64(0)))
      throw std::invalid_argument("distance matrix diagonal must be zero");
    for (int j = 0; j < n; ++j) {
      if (d[(size_t)i][(size_t)j] < Rat64(0))
        throw std::invalid_argument("negative distance");
      if (!(d[(size_t)i][(size_t)j] == d[(size_t)j][(size_t)i]))
        throw std::invalid_argument("distance matrix must be symmetric");
    }
  }
}

struct PathLabel {
  Rat64 dist{};
  int hops = 0;
  std::vector<int> path;
};

// Total order used for path selection: weight, then hop count, then the
// node-id sequence. Equal-rank labels have equal-length sequences, so the
// lexicographic comparison is between aligned sequences.
bool label_better(const PathLabel& a, const PathLabel& b) {
  if (a.dist < b.dist) return true;
  if (b.dist < a.dist) return false;
  if (a.hops != b.hops) return a.hops < b.hops;
  return a.path < b.path;
}

}  // namespace

std::vector<Finding> validate_network(const DistributionNetwork& net) {
  std::vector<Finding> out;
  auto fatal = [&](std::string m) { out.push_back({true, std::move(m)}); };
  auto warn = [&](std::string m) { out.push_back({false, std::move(m)}); };

  const int n = net.num_nodes();
  if (!ids_contiguous(net.nodes)) {
    fatal("node ids must be contiguous starting at 1");
    return out;  // later checks index by id
  }
  for (const Node& nd : net.nodes) {
    if (nd.icu_beds < 0) fatal("node " + std::to_string(nd.id) + ": negative icu_beds");
    if (nd.population_weight < Rat64(0))
      fatal("node " + std::to_string(nd.id) + ": negative population weight");
  }
  for (size_t a = 0; a < net.arcs.size(); ++a) {
    const Arc& arc = net.arcs[a];
    std::string where = "arc #" + std::to_string(a + 1);
    if (arc.from < 1 || arc.from > n || arc.to < 1 || arc.to > n)
      fatal(where + ": endpoint outside 1.." + std::to_string(n));
    else if (arc.from == arc.to)
      fatal(where + ": loop arcs are not allowed");
    if (arc.weight < Rat64(0)) fatal(where + ": negative weight");
  }
  for (size_t k = 0; k < net.regions.size(); ++k) {
    if (net.regions[k].empty()) fatal("region #" + std::to_string(k + 1) + " is empty");
    for (int id : net.regions[k])
      if (id < 1 || id > n)
        fatal("region #" + std::to_string(k + 1) + ": unknown node " + std::to_string(id));
  }
  std::vector<int> seen((size_t)n + 1, 0);
  for (size_t l = 0; l < net.partition.size(); ++l) {
    for (int id : net.partition[l]) {
      if (id < 1 || id > n) {
        fatal("fairness group #" + std::to_string(l + 1) + ": unknown node " + std::to_string(id));
        continue;
      }
      if (++seen[(size_t)id] == 2)
        fatal("fairness groups must be disjoint; node " + std::to_string(id) +
              " appears more than once");
    }
  }

  if (net.regions.empty()) {
    if (n > 0) warn("no sharing regions declared; extra stock cannot be scheduled");
  } else {
    std::vector<bool> covered((size_t)n + 1, false);
    for (const auto& reg : net.regions)
      for (int id : reg)
        if (id >= 1 && id <= n) covered[(size_t)id] = true;
    for (const Node& nd : net.nodes)
      if (nd.kind == NodeKind::Hospital && !covered[(size_t)nd.id])
        warn("hospital " + std::to_string(nd.id) +
             " belongs to no sharing region and can never receive extra stock");
  }
  return out;
}

std::vector<std::pair<int, int>> ReachabilityTable::pairs() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i != j && reachable(i, j)) out.emplace_back(i, j);
  return out;
}

ReachabilityTable build_reachability(const DistributionNetwork& net,
                                     const ProcessingRule& processing) {
  auto findings = validate_network(net);
  for (const Finding& f : findings)
    if (f.fatal) throw std::invalid_argument("invalid network: " + f.message);

  const int n = net.num_nodes();
  std::vector<std::vector<std::pair<int, Rat64>>> out_arcs((size_t)n + 1);
  for (const Arc& a : net.arcs) out_arcs[(size_t)a.from].emplace_back(a.to, a.weight);
  for (auto& lst : out_arcs) std::sort(lst.begin(), lst.end(), [](const auto& x, const auto& y) {
    return x.first < y.first;
  });

  ReachabilityTable table;
  table.n = n;
  table.cells.assign((size_t)n * (size_t)n, std::nullopt);

  std::vector<std::optional<PathLabel>> lab((size_t)n + 1);
  std::vector<char> queued((size_t)n + 1, 0);
  for (int s = 1; s <= n; ++s) {
    std::fill(lab.begin(), lab.end(), std::nullopt);
    std::fill(queued.begin(), queued.end(), 0);
    lab[(size_t)s] = PathLabel{Rat64(0), 0, {s}};
    std::deque<int> work{s};
    queued[(size_t)s] = 1;
    while (!work.empty()) {
      int u = work.front();
      work.pop_front();
      queued[(size_t)u] = 0;
      PathLabel base = *lab[(size_t)u];  // copy: lab may grow while relaxing
      for (const auto& [v, w] : out_arcs[(size_t)u]) {
        PathLabel cand{base.dist + w, base.hops + 1, base.path};
        cand.path.push_back(v);
        if (!lab[(size_t)v] || label_better(cand, *lab[(size_t)v])) {
          lab[(size_t)v] = std::move(cand);
          if (!queued[(size_t)v]) {
            work.push_back(v);
            queued[(size_t)v] = 1;
          }
        }
      }
    }
    for (int t = 1; t <= n; ++t) {
      if (t == s || !lab[(size_t)t]) continue;
      const PathLabel& l = *lab[(size_t)t];
      Rat64 surcharge{};
      if (processing.kind == ProcessingRule::Kind::Flat) {
        surcharge = processing.amount;
      } else {
        std::int64_t hubs = 0;
        for (size_t k = 1; k + 1 < l.path.size(); ++k)
          if (net.node(l.path[k]).kind == NodeKind::LogisticCenter) ++hubs;
        surcharge = processing.amount * Rat64(hubs);
      }
      table.cells[(size_t)((s - 1) * n + (t - 1))] =
          ReachabilityTable::Entry{l.dist + surcharge, l.hops, l.path};
    }
  }
  return table;
}

DistributionNetwork make_complete_graph(std::vector<Node> nodes,
                                        const std::vector<std::vector<Rat64>>& distance) {
  if (nodes.size() < 2) throw std::invalid_argument("complete graph needs at least 2 nodes");
  assign_ids_if_unset(nodes);
  if (!ids_contiguous(nodes))
    throw std::invalid_argument("node ids must be contiguous starting at 1");
  const int n = (int)nodes.size();
  check_distance_matrix(n, distance);

  Rat64 maxd{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (maxd < distance[(size_t)i][(size_t)j]) maxd = distance[(size_t)i][(size_t)j];

  DistributionNetwork net;
  net.nodes = std::move(nodes);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      Rat64 d = distance[(size_t)(i - 1)][(size_t)(j - 1)];
      net.arcs.push_back({i, j, maxd == Rat64(0) ? Rat64(0) : d / maxd});
    }
  return net;
}

DistributionNetwork make_lc_graph(std::vector<Node> nodes,
                                  const std::map<std::string, int>& provincial_centers,
                                  std::optional<int> regional_center,
                                  const std::vector<std::vector<Rat64>>& distance) {
  if (nodes.empty()) throw std::invalid_argument("lc graph needs at least 1 node");
  assign_ids_if_unset(nodes);
  if (!ids_contiguous(nodes))
    throw std::invalid_argument("node ids must be contiguous starting at 1");
  const int n = (int)nodes.size();
  check_distance_matrix(n, distance);

  std::set<int> centers;
  for (const auto& [prov, id] : provincial_centers) {
    if (id < 1 || id > n)
      throw std::invalid_argument("center of '" + prov + "' is not a known node");
    centers.insert(id);
  }
  if (regional_center) {
    if (*regional_center < 1 || *regional_center > n)
      throw std::invalid_argument("regional center is not a known node");
    centers.insert(*regional_center);
  }

  // Undirected links first, in a fixed order: hospital spokes by node id,
  // then center uplinks by province name.
  std::vector<std::pair<int, int>> links;
  for (const Node& nd : nodes) {
    if (centers.count(nd.id) || nd.kind != NodeKind::Hospital) continue;
    auto it = provincial_centers.find(nd.province);
    if (it == provincial_centers.end())
      throw std::invalid_argument("hospital " + std::to_string(nd.id) + " ('" + nd.label +
                                  "') has no logistic center for province '" + nd.province + "'");
    links.emplace_back(nd.id, it->second);
  }
  std::set<std::pair<int, int>> uplinks_seen;
  for (const auto& [prov, id] : provincial_centers) {
    if (!regional_center || id == *regional_center) continue;
    auto key = std::minmax(id, *regional_center);
    if (uplinks_seen.insert({key.first, key.second}).second)
      links.emplace_back(id, *regional_center);
  }

  Rat64 maxd{};
  for (const auto& [a, b] : links) {
    const Rat64& d = distance[(size_t)(a - 1)][(size_t)(b - 1)];
    if (maxd < d) maxd = d;
  }

  DistributionNetwork net;
  net.nodes = std::move(nodes);
  for (const auto& [a, b] : links) {
    Rat64 d = distance[(size_t)(a - 1)][(size_t)(b - 1)];
    Rat64 w = maxd == Rat64(0) ? Rat64(0) : d / maxd;
    net.arcs.push_back({a, b, w});
    net.arcs.push_back({b, a, w});
  }
  for (int id : centers) net.nodes[(size_t)(id - 1)].kind = NodeKind::LogisticCenter;
  return net;
}

}  // namespace stockflow
