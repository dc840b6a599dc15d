#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <string>
#include <vector>

#include "stockflow/evaluation.hpp"
#include "stockflow/formulation.hpp"
#include "stockflow/heuristic.hpp"
#include "stockflow/instance.hpp"
#include "stockflow/solver.hpp"
#include "support/gen.hpp"

using namespace stockflow;
using namespace stockflow::testsupport;

namespace {

milp::Solution solve_exact(const milp::Model& m) {
  milp::SolveOptions so;
  return milp::solve(m, so);
}

std::vector<int> lengths(const HorizonSplit& s) {
  std::vector<int> out;
  for (int k = 1; k <= s.parts(); ++k) out.push_back(s.past_last(k) - s.first(k));
  return out;
}

Node bare_node(int id) {
  Node n;
  n.id = id;
  n.label = "h" + std::to_string(id);
  n.kind = NodeKind::Hospital;
  n.province = "p";
  n.icu_beds = 10;
  return n;
}

// One isolated node; enough to drive the carry-over and quota machinery.
Instance lone_node_instance(int q) {
  Instance inst;
  inst.network.nodes = {bare_node(1)};
  inst.network.partition = {{1}};
  inst.horizon = q;
  inst.profile.initial_stock = {0};
  inst.profile.max_deliveries = {std::nullopt};
  inst.profile.share_fraction = {Rat64(1)};
  inst.profile.max_shipment = {20};
  inst.profile.storage_cap = {std::nullopt};
  inst.scenarios.names = {"w1"};
  inst.scenarios.prob = {Rat64(1)};
  inst.scenarios.demand.assign(
      1, std::vector<std::vector<std::int64_t>>(1, std::vector<std::int64_t>((size_t)q, 0)));
  inst.reach = build_reachability(inst.network, ProcessingRule::flat(Rat64(0)));
  return inst;
}

}  // namespace

TEST_CASE("even splits") {
  {
    HorizonSplit s = make_even_split(4, 2);
    CHECK(s.breakpoints == std::vector<int>{1, 3, 5});
    CHECK(lengths(s) == std::vector<int>{2, 2});
  }
  {
    HorizonSplit s = make_even_split(49, 12);
    CHECK(s.parts() == 12);
    std::vector<int> want{5, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4};
    CHECK(lengths(s) == want);
    CHECK(s.breakpoints.front() == 1);
    CHECK(s.breakpoints.back() == 50);
  }
  {
    HorizonSplit s = make_even_split(5, 5);
    CHECK(lengths(s) == std::vector<int>{1, 1, 1, 1, 1});
  }
  {
    HorizonSplit s = make_even_split(7, 1);
    CHECK(s.breakpoints == std::vector<int>{1, 8});
  }
  CHECK_THROWS_AS(make_even_split(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_even_split(3, 4), std::invalid_argument);
}

TEST_CASE("a one-part split reproduces the exact solve") {
  for (std::uint64_t seed : {0ull, 3ull, 7ull}) {
    Instance inst = make_tiny_instance(seed);
    Compiled c = compile(inst, {Family::TotalExpected, false});
    milp::Solution sol = solve_exact(c.model);
    if (sol.status != milp::SolveStatus::Optimal) continue;
    RollingResult roll = rolling_horizon_solve(inst, {Family::TotalExpected, false},
                                               make_even_split(inst.horizon, 1));
    Plan exact = decode_plan(c.index, sol.values);
    CHECK(roll.plan.x == exact.x);
    CHECK(roll.plan.s == exact.s);
    REQUIRE(roll.subproblems.size() == 1);
    CHECK(roll.subproblems[0].objective == sol.objective);
    CHECK(roll.subproblems[0].status == milp::SolveStatus::Optimal);
  }

  // with scheduled receipts in play the first-period inflow folds into the
  // synthetic initial stock; the solve must come out the same
  Instance inst = make_two_node_fixture();
  inst.receipts = {{0, 0}, {1, 0}};
  Compiled c = compile(inst, {Family::TotalExpected, false});
  milp::Solution sol = solve_exact(c.model);
  REQUIRE(sol.status == milp::SolveStatus::Optimal);
  RollingResult roll = rolling_horizon_solve(inst, {Family::TotalExpected, false},
                                             make_even_split(inst.horizon, 1));
  Plan exact = decode_plan(c.index, sol.values);
  CHECK(roll.plan.x == exact.x);
  CHECK(roll.plan.s == exact.s);
  CHECK(roll.subproblems[0].objective == sol.objective);
  CHECK(roll.subproblems[0].carry_in == std::vector<std::int64_t>{4, 1});
}

TEST_CASE("fixture split carries the boundary state") {
  Instance inst = make_two_node_fixture();
  HorizonSplit split;
  split.breakpoints = {1, 2, 3};
  RollingResult roll = rolling_horizon_solve(inst, {Family::TotalExpected, false}, split);

  REQUIRE(roll.subproblems.size() == 2);
  CHECK(roll.subproblems[0].first_period == 1);
  CHECK(roll.subproblems[0].last_period == 2);
  CHECK(roll.subproblems[0].frozen_through == 1);
  CHECK(roll.subproblems[1].first_period == 2);
  CHECK(roll.subproblems[1].last_period == 2);
  CHECK(roll.subproblems[0].carry_in == std::vector<std::int64_t>{4, 0});
  // the frozen first-period shipment of 3 lands right on the boundary
  CHECK(roll.subproblems[1].carry_in == std::vector<std::int64_t>{1, 3});

  EvaluationReport rep = evaluate_plan(inst, roll.plan);
  CHECK(rep.feasible());
  CHECK(rep.plain[3] == BigRat(0));  // this split loses nothing on the fixture

  Compiled c = compile(inst, {Family::TotalExpected, false});
  milp::Solution sol = solve_exact(c.model);
  REQUIRE(sol.status == milp::SolveStatus::Optimal);
  CHECK(rep.plain[3] >= sol.objective);

  nlohmann::json diag = nlohmann::json::parse(diagnostics_json(roll));
  REQUIRE(diag.at("subproblems").size() == 2);
  CHECK(diag.at("subproblems")[0].at("k") == 1);
  CHECK(diag.at("subproblems")[0].at("status") == "optimal");
  CHECK(diag.at("subproblems")[1].at("carry_in") == nlohmann::json::array({1, 3}));
  CHECK(diag.at("shipments") == 1);
}

TEST_CASE("glued plans are feasible and never beat the optimum") {
  int rolled = 0, compared = 0, regret_compared = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Instance inst = make_tiny_instance(seed);
    if (inst.horizon < 2) continue;
    HorizonSplit split = make_even_split(inst.horizon, 2);
    for (Family fam : {Family::TotalExpected, Family::WorstUnit}) {
      RollingResult roll;
      try {
        roll = rolling_horizon_solve(inst, {fam, false}, split);
      } catch (const milp::SolverError&) {
        continue;  // some subproblem admits no plan
      }
      ++rolled;
      EvaluationReport rep = evaluate_plan(inst, roll.plan);
      CHECK(rep.feasible());
      Compiled c = compile(inst, {fam, false});
      milp::Solution sol = solve_exact(c.model);
      if (sol.status != milp::SolveStatus::Optimal) continue;
      ++compared;
      CHECK(rep.plain[(size_t)fam] >= sol.objective);
    }
    // regret variant: the glued plan is feasible for the full problem, so its
    // regret against the global benchmarks cannot beat the exact optimum
    try {
      RollingResult roll = rolling_horizon_solve(inst, {Family::TotalExpected, true}, split);
      EvaluationReport rep = evaluate_plan(inst, roll.plan);
      CHECK(rep.feasible());
      CompiledRegret cr = compile_regret(inst, Family::TotalExpected);
      milp::Solution sol = solve_exact(cr.model);
      if (sol.status == milp::SolveStatus::Optimal) {
        ++regret_compared;
        CHECK(regret_value(rep, Family::TotalExpected, cr.baselines.value) >= sol.objective);
      }
    } catch (const milp::SolverError&) {
    }
  }
  CHECK(rolled >= 20);
  CHECK(compared >= 15);
  CHECK(regret_compared >= 5);
}

TEST_CASE("medium instances stay feasible under coarse splits") {
  // floating relaxations keep the sub-solves quick; incumbents are still
  // exact, so the glued plan and its evaluation are too
  milp::SolveOptions limits;
  limits.mode = milp::NumericMode::Floating;
  limits.node_limit = 200000;
  limits.time_limit_s = 20.0;
  int done = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Instance inst = make_medium_instance(seed, 4, 6);
    for (int K : {2, 3}) {
      if (K > inst.horizon) continue;
      RollingResult roll;
      try {
        roll = rolling_horizon_solve(inst, {Family::TotalExpected, false},
                                     make_even_split(inst.horizon, K), limits);
      } catch (const milp::SolverError&) {
        continue;
      }
      ++done;
      EvaluationReport rep = evaluate_plan(inst, roll.plan);
      CHECK(rep.feasible());
      // departures never leave in the very last period: they could not land
      for (const auto& [key, amt] : roll.plan.x) {
        (void)amt;
        CHECK(std::get<2>(key) < inst.horizon);
      }
    }
  }
  CHECK(done >= 4);
}

TEST_CASE("boundary extra stock belongs to the later subproblem") {
  Instance inst = make_two_node_fixture();
  inst.horizon = 4;
  inst.scenarios.demand = {{{0, 0, 0, 0}, {0, 0, 0, 5}}};
  inst.profile.initial_stock = {0, 0};
  inst.network.regions = {{1, 2}};
  inst.extra.amount = {{0, 0, 5, 0}};  // lands exactly on the K=2 boundary

  HorizonSplit split = make_even_split(4, 2);
  REQUIRE(split.breakpoints == std::vector<int>{1, 3, 5});
  RollingResult roll = rolling_horizon_solve(inst, {Family::TotalExpected, false}, split);

  EvaluationReport rep = evaluate_plan(inst, roll.plan);
  CHECK(rep.feasible());
  CHECK(rep.plain[3] == BigRat(0));  // five units placed at node 2 in period 3
  CHECK(rep.placed[0][2] == 5);
  std::int64_t at2 = 0;
  for (const auto& [key, amt] : roll.plan.s)
    if (std::get<1>(key) == 1 && std::get<2>(key) == 3) at2 += amt;
  CHECK(at2 == 5);
  CHECK(roll.subproblems[0].frozen_through == 2);
}

TEST_CASE("an impossible subproblem is named in the error") {
  Instance inst = lone_node_instance(2);
  inst.network.regions = {{1}};
  inst.extra.amount = {{0, 10}};
  inst.profile.storage_cap = {std::optional<std::int64_t>(3)};

  HorizonSplit split;
  split.breakpoints = {1, 2, 3};
  try {
    rolling_horizon_solve(inst, {Family::TotalExpected, false}, split);
    FAIL("expected a solver error");
  } catch (const milp::SolverError& e) {
    CHECK(std::string(e.what()).find("subproblem 2") != std::string::npos);
  }
}

TEST_CASE("splits that do not span the horizon are rejected") {
  Instance inst = make_two_node_fixture();
  HorizonSplit bad;
  bad.breakpoints = {1, 2};  // horizon is 2, so the end must be 3
  CHECK_THROWS_AS(rolling_horizon_solve(inst, {Family::TotalExpected, false}, bad),
                  std::invalid_argument);
  bad.breakpoints = {1, 3, 3};
  CHECK_THROWS_AS(rolling_horizon_solve(inst, {Family::TotalExpected, false}, bad),
                  std::invalid_argument);
}
