#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>
#include <vector>

#include "stockflow/network.hpp"

using namespace stockflow;

namespace {

Node hospital(std::string label, std::string province, std::int64_t beds = 10) {
  Node n;
  n.label = std::move(label);
  n.kind = NodeKind::Hospital;
  n.province = std::move(province);
  n.icu_beds = beds;
  return n;
}

std::vector<std::vector<Rat64>> uniform_distance(int n, Rat64 d) {
  std::vector<std::vector<Rat64>> m((size_t)n, std::vector<Rat64>((size_t)n, d));
  for (int i = 0; i < n; ++i) m[(size_t)i][(size_t)i] = Rat64(0);
  return m;
}

std::map<std::pair<int, int>, Rat64> arc_weights(const DistributionNetwork& net) {
  std::map<std::pair<int, int>, Rat64> w;
  for (const Arc& a : net.arcs) w[{a.from, a.to}] = a.weight;
  return w;
}

// Independent recomputation of a table entry from its stored path.
Rat64 replay_length(const DistributionNetwork& net, const ProcessingRule& rule,
                    const std::map<std::pair<int, int>, Rat64>& w,
                    const ReachabilityTable::Entry& e) {
  Rat64 len{};
  for (size_t k = 0; k + 1 < e.path.size(); ++k) {
    auto it = w.find({e.path[k], e.path[k + 1]});
    REQUIRE(it != w.end());
    len = len + it->second;
  }
  if (rule.kind == ProcessingRule::Kind::Flat) {
    len = len + rule.amount;
  } else {
    std::int64_t hubs = 0;
    for (size_t k = 1; k + 1 < e.path.size(); ++k)
      if (net.node(e.path[k]).kind == NodeKind::LogisticCenter) ++hubs;
    len = len + rule.amount * Rat64(hubs);
  }
  return len;
}

// 106 hospitals over the eight Andalusian provinces; the first hospital of
// each province doubles as its logistic center, and the regional center is a
// plain hospital in Malaga.
std::vector<Node> andalusia_roster(std::map<std::string, int>& centers, int& regional) {
  const std::vector<std::pair<std::string, int>> provinces = {
      {"Almeria", 10}, {"Cadiz", 13},  {"Cordoba", 12}, {"Granada", 14},
      {"Huelva", 8},   {"Jaen", 9},    {"Malaga", 20},  {"Sevilla", 20}};
  std::vector<Node> roster;
  centers.clear();
  regional = 0;
  for (const auto& [prov, count] : provinces)
    for (int k = 0; k < count; ++k) {
      roster.push_back(hospital(prov + " h" + std::to_string(k + 1), prov));
      int id = (int)roster.size();
      if (k == 0) centers[prov] = id;
      if (prov == "Malaga" && k == 1) regional = id;  // not a provincial center
    }
  REQUIRE(roster.size() == 106);
  REQUIRE(regional != 0);
  return roster;
}

}  // namespace

TEST_CASE("flat surcharge on a small complete graph") {
  std::vector<Node> nodes = {hospital("a", "p"), hospital("b", "p"), hospital("c", "p")};
  DistributionNetwork net = make_complete_graph(nodes, uniform_distance(3, Rat64(1)));
  REQUIRE(net.arcs.size() == 6);
  for (const Arc& a : net.arcs) CHECK(a.weight == Rat64(1));

  ReachabilityTable t = build_reachability(net, ProcessingRule::flat(Rat64(1)));
  CHECK(t.pairs().size() == 6);
  for (auto [i, j] : t.pairs()) {
    CHECK(t.at(i, j).length == Rat64(2));
    CHECK(t.at(i, j).hops == 1);
  }
}

TEST_CASE("per-hub surcharge through a star") {
  DistributionNetwork net;
  net.nodes = {hospital("h1", "p"), hospital("c", "p"), hospital("h2", "p")};
  net.nodes[0].id = 1;
  net.nodes[1].id = 2;
  net.nodes[1].kind = NodeKind::LogisticCenter;
  net.nodes[2].id = 3;
  Rat64 half(1, 2);
  net.arcs = {{1, 2, half}, {2, 1, half}, {2, 3, half}, {3, 2, half}};
  net.regions = {{1, 2, 3}};

  ReachabilityTable t = build_reachability(net, ProcessingRule::per_hub(Rat64(1, 10)));
  CHECK(t.at(1, 3).length == Rat64(11, 10));  // one intermediate center
  CHECK(t.at(1, 3).path == std::vector<int>{1, 2, 3});
  CHECK(t.at(1, 2).length == half);  // endpoints carry no surcharge
  CHECK(t.at(2, 3).length == half);
}

TEST_CASE("complete graph normalizes distances to the largest") {
  {
    std::vector<Node> two = {hospital("a", "p"), hospital("b", "p")};
    DistributionNetwork net = make_complete_graph(two, uniform_distance(2, Rat64(10)));
    REQUIRE(net.arcs.size() == 2);
    CHECK(net.arcs[0].weight == Rat64(1));
    CHECK(net.arcs[1].weight == Rat64(1));
  }
  {
    std::vector<Node> three = {hospital("a", "p"), hospital("b", "p"), hospital("c", "p")};
    auto d = uniform_distance(3, Rat64(20));
    d[0][1] = d[1][0] = Rat64(10);
    DistributionNetwork net = make_complete_graph(three, d);
    auto w = arc_weights(net);
    CHECK(w[{1, 2}] == Rat64(1, 2));
    CHECK(w[{1, 3}] == Rat64(1));
    CHECK(w[{2, 3}] == Rat64(1));
  }
  {
    std::vector<Node> many;
    for (int k = 0; k < 51; ++k) many.push_back(hospital("h" + std::to_string(k + 1), "Madrid"));
    DistributionNetwork net = make_complete_graph(many, uniform_distance(51, Rat64(3)));
    CHECK(net.arcs.size() == 51 * 50);
    ReachabilityTable t = build_reachability(net, ProcessingRule::flat(Rat64(1)));
    CHECK(t.pairs().size() == 51 * 50);  // every ordered pair is reachable
  }
}

TEST_CASE("lc graph shapes and link counts") {
  SUBCASE("one province, separate center node") {
    std::vector<Node> nodes = {hospital("h1", "p"), hospital("h2", "p")};
    Node c;
    c.label = "center";
    c.kind = NodeKind::LogisticCenter;
    c.province = "p";
    nodes.push_back(c);
    DistributionNetwork net =
        make_lc_graph(nodes, {{"p", 3}}, std::nullopt, uniform_distance(3, Rat64(1)));
    CHECK(net.arcs.size() == 4);  // two bidirectional spokes
  }
  SUBCASE("single-province region with a hospital acting as center") {
    std::vector<Node> nodes;
    for (int k = 0; k < 51; ++k) nodes.push_back(hospital("h" + std::to_string(k + 1), "Madrid"));
    DistributionNetwork net =
        make_lc_graph(nodes, {{"Madrid", 1}}, std::nullopt, uniform_distance(51, Rat64(1)));
    CHECK(net.arcs.size() == 100);  // 50 spokes, both directions
    CHECK(net.node(1).kind == NodeKind::LogisticCenter);
    auto w = arc_weights(net);
    CHECK(w.count({2, 1}) == 1);
    CHECK(w.count({2, 3}) == 0);  // hospitals never link to each other
  }
  SUBCASE("eight provinces plus a regional center") {
    std::map<std::string, int> centers;
    int regional = 0;
    std::vector<Node> roster = andalusia_roster(centers, regional);
    DistributionNetwork net =
        make_lc_graph(roster, centers, regional, uniform_distance(106, Rat64(1)));
    CHECK(net.arcs.size() == 210);  // 105 undirected links: 97 spokes + 8 uplinks
    CHECK(net.node(regional).kind == NodeKind::LogisticCenter);

    // With the regional center located at a provincial center instead, the
    // count is unchanged: one more spoke, one fewer uplink.
    DistributionNetwork net2 =
        make_lc_graph(roster, centers, centers.at("Sevilla"), uniform_distance(106, Rat64(1)));
    CHECK(net2.arcs.size() == 210);
  }
  SUBCASE("hospital with no center for its province is rejected") {
    std::vector<Node> nodes = {hospital("h1", "p"), hospital("h2", "q")};
    CHECK_THROWS_AS(
        make_lc_graph(nodes, {{"p", 1}}, std::nullopt, uniform_distance(2, Rat64(1))),
        std::invalid_argument);
  }
}

TEST_CASE("lc graph separates provinces but keeps all pairs reachable") {
  std::map<std::string, int> centers;
  int regional = 0;
  std::vector<Node> roster = andalusia_roster(centers, regional);
  DistributionNetwork net =
      make_lc_graph(roster, centers, regional, uniform_distance(106, Rat64(1)));
  auto w = arc_weights(net);
  // Two plain hospitals in different provinces: never adjacent.
  int h_almeria = centers.at("Almeria") + 1;
  int h_cadiz = centers.at("Cadiz") + 1;
  CHECK(net.node(h_almeria).kind == NodeKind::Hospital);
  CHECK(net.node(h_cadiz).kind == NodeKind::Hospital);
  CHECK(w.count({h_almeria, h_cadiz}) == 0);

  ReachabilityTable t = build_reachability(net, ProcessingRule::per_hub(Rat64(1, 10)));
  CHECK(t.pairs().size() == (size_t)(106 * 105));
  // Hospital to hospital across provinces: spoke, uplink, uplink, spoke,
  // with three logistic centers strictly inside.
  CHECK(t.at(h_almeria, h_cadiz).hops == 4);
  CHECK(t.at(h_almeria, h_cadiz).length == Rat64(4) + Rat64(3, 10));
}

TEST_CASE("path replay reconstructs every reported length") {
  std::map<std::string, int> centers;
  int regional = 0;
  std::vector<Node> roster = andalusia_roster(centers, regional);
  DistributionNetwork lc =
      make_lc_graph(roster, centers, regional, uniform_distance(106, Rat64(2)));
  ProcessingRule perhub = ProcessingRule::per_hub(Rat64(1, 10));
  ReachabilityTable tl = build_reachability(lc, perhub);
  auto wl = arc_weights(lc);
  for (auto [i, j] : tl.pairs()) {
    const auto& e = tl.at(i, j);
    CHECK(e.path.front() == i);
    CHECK(e.path.back() == j);
    CHECK(e.hops == (int)e.path.size() - 1);
    CHECK(replay_length(lc, perhub, wl, e) == e.length);
  }

  // Complete graph with deliberately non-metric distances so some shortest
  // paths are multi-hop.
  std::vector<Node> five;
  for (int k = 0; k < 5; ++k) five.push_back(hospital("n" + std::to_string(k + 1), "p"));
  auto d = uniform_distance(5, Rat64(0));
  for (int i = 1; i <= 5; ++i)
    for (int j = 1; j <= 5; ++j)
      if (i != j) d[(size_t)(i - 1)][(size_t)(j - 1)] = Rat64((i * j) % 7 + 1);
  DistributionNetwork cg = make_complete_graph(five, d);
  ProcessingRule flat = ProcessingRule::flat(Rat64(1));
  ReachabilityTable tc = build_reachability(cg, flat);
  auto wc = arc_weights(cg);
  bool any_multi_hop = false;
  for (auto [i, j] : tc.pairs()) {
    const auto& e = tc.at(i, j);
    if (e.hops > 1) any_multi_hop = true;
    CHECK(replay_length(cg, flat, wc, e) == e.length);
  }
  CHECK(any_multi_hop);  // the instance must actually exercise path search
}

TEST_CASE("path selection breaks ties by hops then node sequence") {
  DistributionNetwork net;
  for (int k = 0; k < 4; ++k) {
    Node nd = hospital("n" + std::to_string(k + 1), "p");
    nd.id = k + 1;
    net.nodes.push_back(nd);
  }
  net.regions = {{1, 2, 3, 4}};
  SUBCASE("direct arc wins over equal-weight two-hop paths") {
    net.arcs = {{1, 2, Rat64(1)}, {2, 4, Rat64(1)}, {1, 3, Rat64(1)},
                {3, 4, Rat64(1)}, {1, 4, Rat64(2)}};
    ReachabilityTable t = build_reachability(net, ProcessingRule::flat(Rat64(0)));
    CHECK(t.at(1, 4).length == Rat64(2));
    CHECK(t.at(1, 4).path == std::vector<int>{1, 4});
  }
  SUBCASE("equal weight and hops fall back to lexicographic ids") {
    net.arcs = {{1, 3, Rat64(1)}, {3, 4, Rat64(1)}, {1, 2, Rat64(1)}, {2, 4, Rat64(1)}};
    ReachabilityTable t = build_reachability(net, ProcessingRule::flat(Rat64(0)));
    CHECK(t.at(1, 4).path == std::vector<int>{1, 2, 4});
  }
}

TEST_CASE("zero distances and one-way connectivity") {
  {
    std::vector<Node> three = {hospital("a", "p"), hospital("b", "p"), hospital("c", "p")};
    auto d = uniform_distance(3, Rat64(2));
    d[0][1] = d[1][0] = Rat64(0);
    DistributionNetwork net = make_complete_graph(three, d);
    auto w = arc_weights(net);
    CHECK(w[{1, 2}] == Rat64(0));
    ReachabilityTable t = build_reachability(net, ProcessingRule::flat(Rat64(0)));
    CHECK(t.at(1, 2).length == Rat64(0));
  }
  {
    DistributionNetwork net;
    Node a = hospital("a", "p");
    a.id = 1;
    Node b = hospital("b", "p");
    b.id = 2;
    net.nodes = {a, b};
    net.arcs = {{1, 2, Rat64(1)}};
    net.regions = {{1, 2}};
    ReachabilityTable t = build_reachability(net, ProcessingRule::flat(Rat64(0)));
    CHECK(t.reachable(1, 2));
    CHECK_FALSE(t.reachable(2, 1));
    CHECK(t.pairs() == std::vector<std::pair<int, int>>{{1, 2}});
  }
}

TEST_CASE("validation findings and hard rejections") {
  DistributionNetwork net;
  Node a = hospital("a", "p");
  a.id = 1;
  Node b = hospital("b", "p");
  b.id = 2;
  net.nodes = {a, b};
  net.arcs = {{1, 2, Rat64(1)}, {2, 1, Rat64(1)}};
  net.regions = {{1, 2}};

  SUBCASE("clean network has no findings") {
    CHECK(validate_network(net).empty());
  }
  SUBCASE("negative weight is fatal") {
    net.arcs[0].weight = Rat64(-1);
    auto f = validate_network(net);
    REQUIRE(f.size() == 1);
    CHECK(f[0].fatal);
    CHECK_THROWS_AS(build_reachability(net, ProcessingRule::flat(Rat64(0))),
                    std::invalid_argument);
  }
  SUBCASE("uncovered hospital is an advisory, not an error") {
    net.regions = {{1}};
    auto f = validate_network(net);
    REQUIRE(f.size() == 1);
    CHECK_FALSE(f[0].fatal);
    CHECK(build_reachability(net, ProcessingRule::flat(Rat64(0))).pairs().size() == 2);
  }
  SUBCASE("uncovered logistic center draws no advisory") {
    net.nodes[1].kind = NodeKind::LogisticCenter;
    net.regions = {{1}};
    CHECK(validate_network(net).empty());
  }
  SUBCASE("overlapping fairness groups are fatal") {
    net.partition = {{1, 2}, {2}};
    auto f = validate_network(net);
    REQUIRE(f.size() == 1);
    CHECK(f[0].fatal);
  }
  SUBCASE("empty region and loop arc are fatal") {
    net.regions.push_back({});
    net.arcs.push_back({1, 1, Rat64(1)});
    auto f = validate_network(net);
    int fatals = 0;
    for (const auto& x : f) fatals += x.fatal ? 1 : 0;
    CHECK(fatals == 2);
  }
}
