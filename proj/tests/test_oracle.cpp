#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <optional>
#include <vector>

#include "stockflow/instance.hpp"
#include "stockflow/network.hpp"
#include "support/gen.hpp"
#include "support/oracle.hpp"

using namespace stockflow;
using namespace stockflow::testsupport;

namespace {

Node bare_node(int id) {
  Node n;
  n.id = id;
  n.label = "h" + std::to_string(id);
  n.kind = NodeKind::Hospital;
  n.province = "p";
  n.icu_beds = 10;
  return n;
}

// Instance skeleton with n isolated or manually wired nodes, one scenario of
// zero demand, unlimited and fully shareable stock. Tests then tweak fields.
Instance skeleton(int n, int q, std::vector<Arc> arcs) {
  Instance inst;
  for (int i = 1; i <= n; ++i) {
    inst.network.nodes.push_back(bare_node(i));
    inst.network.partition.push_back({i});
  }
  inst.network.arcs = std::move(arcs);
  inst.horizon = q;
  inst.profile.initial_stock.assign((size_t)n, 0);
  inst.profile.max_deliveries.assign((size_t)n, std::nullopt);
  inst.profile.share_fraction.assign((size_t)n, Rat64(1));
  inst.profile.max_shipment.assign((size_t)n, 20);
  inst.profile.storage_cap.assign((size_t)n, std::nullopt);
  inst.scenarios.names = {"w1"};
  inst.scenarios.prob = {Rat64(1)};
  inst.scenarios.demand.assign(
      1, std::vector<std::vector<std::int64_t>>((size_t)n,
                                                std::vector<std::int64_t>((size_t)q, 0)));
  inst.reach = build_reachability(inst.network, ProcessingRule::flat(Rat64(0)));
  return inst;
}

}  // namespace

TEST_CASE("two-node fixture optima") {
  Instance inst = make_two_node_fixture();
  OracleResult r = oracle_solve(inst, 1000000);
  REQUIRE(r.completed);
  CHECK(r.feasible_plans > 0);
  for (int f = 0; f < 4; ++f) {
    REQUIRE(r.plain[(size_t)f].has_value());
    CHECK(*r.plain[(size_t)f] == 0);  // shipping all three spare units covers everything
    REQUIRE(r.regret[(size_t)f].has_value());
    CHECK(*r.regret[(size_t)f] == 0);
    REQUIRE(r.baseline[(size_t)f].size() == 1);
    CHECK(r.baseline[(size_t)f][0] == *r.plain[(size_t)f]);
  }
}

TEST_CASE("two-node fixture with shipping disabled") {
  Instance inst = make_two_node_fixture();
  inst.profile.share_fraction = {Rat64(0), Rat64(0)};
  OracleResult r = oracle_solve(inst, 1000000);
  REQUIRE(r.completed);
  CHECK(r.feasible_plans == 1);  // only the empty plan
  for (int f = 0; f < 4; ++f) CHECK(*r.plain[(size_t)f] == 3);
}

TEST_CASE("exact sharing is forced, at-most sharing is free") {
  Instance inst = skeleton(1, 1, {});
  inst.network.regions = {{1}};
  inst.extra.amount = {{2}};
  inst.scenarios.demand[0][0][0] = 1;

  OracleResult exact = oracle_solve(inst, 1000000);
  REQUIRE(exact.completed);
  CHECK(exact.feasible_plans == 1);
  CHECK(*exact.plain[3] == 0);

  inst.share_mode = ShareMode::AtMost;
  OracleResult atmost = oracle_solve(inst, 1000000);
  REQUIRE(atmost.completed);
  CHECK(atmost.feasible_plans == 3);  // keep 0, 1 or 2 of the offered units
  CHECK(*atmost.plain[3] == 0);
}

TEST_CASE("storage cap can make an instance infeasible") {
  Instance inst = skeleton(1, 1, {});
  inst.profile.initial_stock = {5};
  inst.profile.storage_cap = {std::optional<std::int64_t>(1)};
  OracleResult r = oracle_solve(inst, 1000000);
  REQUIRE(r.completed);
  CHECK(r.feasible_plans == 0);
  for (int f = 0; f < 4; ++f) {
    CHECK(!r.plain[(size_t)f].has_value());
    CHECK(!r.regret[(size_t)f].has_value());
  }
}

TEST_CASE("storage caps steer forced shares") {
  Instance inst = skeleton(2, 1, {});
  inst.network.regions = {{1, 2}};
  inst.extra.amount = {{3}};
  inst.profile.storage_cap[0] = 2;
  OracleResult r = oracle_solve(inst, 1000000);
  REQUIRE(r.completed);
  CHECK(r.feasible_plans == 3);  // node 1 takes 0, 1 or 2 of the three units
  CHECK(*r.plain[3] == 0);
}

TEST_CASE("two-period lags push arrivals past the horizon") {
  Instance inst = make_two_node_fixture();
  inst.reach = build_reachability(inst.network, ProcessingRule::flat(Rat64(1)));
  OracleResult r = oracle_solve(inst, 1000000);
  REQUIRE(r.completed);
  CHECK(r.feasible_plans == 10);  // x12 choices: 4 at t=1 and horizon-capped at t=2
  CHECK(*r.plain[3] == 3);
  CHECK(*r.regret[3] == 0);
}

TEST_CASE("relay prohibition costs a unit, exemption wins it back") {
  Instance inst = skeleton(3, 2, {{1, 2, Rat64(1)}, {2, 3, Rat64(1)}});
  inst.profile.initial_stock = {1, 1, 0};
  inst.scenarios.demand[0][1][1] = 1;  // node 2 at t=2
  inst.scenarios.demand[0][2][1] = 1;  // node 3 at t=2
  OracleResult blocked = oracle_solve(inst, 1000000);
  REQUIRE(blocked.completed);
  CHECK(*blocked.plain[3] == 1);

  inst.relay_exempt = {2};
  OracleResult relayed = oracle_solve(inst, 1000000);
  REQUIRE(relayed.completed);
  CHECK(*relayed.plain[3] == 0);
}

TEST_CASE("window-opening receipts count as arrivals") {
  Instance inst = skeleton(1, 2, {});
  inst.scenarios.demand[0][0] = {0, 2};
  OracleResult without = oracle_solve(inst, 1000000);
  REQUIRE(without.completed);
  CHECK(*without.plain[3] == 2);

  inst.receipts = {{0, 2}};
  OracleResult with = oracle_solve(inst, 1000000);
  REQUIRE(with.completed);
  CHECK(*with.plain[3] == 0);
}

TEST_CASE("opposed scenarios produce a strictly positive optimal regret") {
  Instance inst = skeleton(2, 2, {{1, 2, Rat64(1)}, {2, 1, Rat64(1)}});
  inst.profile.initial_stock = {2, 0};
  inst.scenarios.names = {"w1", "w2"};
  inst.scenarios.prob = {Rat64(1, 2), Rat64(1, 2)};
  inst.scenarios.demand = {{{0, 2}, {0, 0}}, {{0, 0}, {0, 2}}};
  OracleResult r = oracle_solve(inst, 1000000);
  REQUIRE(r.completed);
  CHECK(r.feasible_plans == 3);  // ship 0, 1 or 2 units at t=1, nothing else fits
  CHECK(*r.plain[0] == BigRat(1, 2));
  CHECK(*r.plain[1] == BigRat(1, 2));
  CHECK(*r.plain[2] == BigRat(1, 2));
  CHECK(*r.plain[3] == 1);
  for (int f = 0; f < 4; ++f) {
    CHECK(r.baseline[(size_t)f] == std::vector<BigRat>{BigRat(0), BigRat(0)});
    CHECK(*r.regret[(size_t)f] == 1);  // hedging at one unit each way
  }
}

TEST_CASE("budget exhaustion is reported, not papered over") {
  OracleResult r = oracle_solve(make_two_node_fixture(), 5);
  CHECK(!r.completed);
}

TEST_CASE("generated tiny instances are enumerable and ordered sensibly") {
  int completed = 0, feasible = 0, single_scenario = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Instance a = make_tiny_instance(seed);
    Instance b = make_tiny_instance(seed);
    CHECK(a.scenarios.demand == b.scenarios.demand);  // generator determinism
    OracleResult r = oracle_solve(a, 400000);
    if (!r.completed) continue;
    ++completed;
    if (r.feasible_plans == 0) continue;
    ++feasible;
    CHECK(*r.plain[1] <= *r.plain[0]);  // worst cell vs worst node
    CHECK(*r.plain[0] <= *r.plain[3]);  // worst node vs grand total
    CHECK(*r.plain[2] <= *r.plain[3]);  // worst group vs grand total
    for (int f = 0; f < 4; ++f) {
      CHECK(*r.plain[(size_t)f] >= 0);
      CHECK(*r.regret[(size_t)f] >= 0);
      if (a.scenarios.count() == 1) {
        CHECK(*r.regret[(size_t)f] == 0);
        CHECK(r.baseline[(size_t)f][0] == *r.plain[(size_t)f]);
      }
    }
    if (a.scenarios.count() == 1) ++single_scenario;
  }
  // The harvest must be rich enough to feed the acceptance sweep.
  CHECK(completed >= 20);
  CHECK(feasible >= 15);
  CHECK(single_scenario >= 1);
}
