#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>

#include "stockflow/adapter.hpp"
#include "stockflow/lp_io.hpp"
#include "stockflow/milp.hpp"
#include "stockflow/solver.hpp"

using namespace stockflow;
using namespace stockflow::milp;

namespace {

// Reference answer for all-integer models with finite bounds: walk the whole
// lattice, keep the best exactly-feasible objective.
std::optional<BigRat> lattice_best(const Model& m) {
  std::vector<std::int64_t> point((size_t)m.num_vars());
  std::optional<BigRat> best;
  std::vector<Rat64> rat((size_t)m.num_vars());
  auto feasible = [&] {
    for (int j = 0; j < m.num_vars(); ++j) rat[(size_t)j] = Rat64(point[(size_t)j]);
    return m.check_point(rat).empty();
  };
  std::function<void(int)> rec = [&](int j) {
    if (j == m.num_vars()) {
      if (!feasible()) return;
      BigRat z = m.objective_of(rat);
      if (!best || z < *best) best = z;
      return;
    }
    REQUIRE(m.lb[(size_t)j].finite);
    REQUIRE(m.ub[(size_t)j].finite);
    for (std::int64_t v = m.lb[(size_t)j].value.floor(); v <= m.ub[(size_t)j].value.floor(); ++v) {
      point[(size_t)j] = v;
      rec(j + 1);
    }
  };
  rec(0);
  return best;
}

Model knapsack_model(unsigned seed, int n) {
  std::mt19937 rng(seed);
  Model m;
  std::int64_t wsum = 0;
  std::vector<std::int64_t> w((size_t)n), v((size_t)n);
  for (int i = 0; i < n; ++i) {
    w[(size_t)i] = 1 + (std::int64_t)(rng() % 10);
    v[(size_t)i] = 1 + (std::int64_t)(rng() % 20);
    wsum += w[(size_t)i];
  }
  for (int i = 0; i < n; ++i) {
    int j = m.add_bin("b" + std::to_string(i));
    m.set_obj(j, Rat64(-v[(size_t)i]));
  }
  m.add_row("cap", Sense::Le, Rat64(wsum / 2));
  for (int i = 0; i < n; ++i) m.row_term(i, Rat64(w[(size_t)i]));
  return m;
}

}  // namespace

TEST_CASE("single bounded integer variable") {
  Model m;
  int x = m.add_int("x", Bound::at(Rat64(0)), Bound::at(Rat64(5)));
  m.set_obj(x, Rat64(-1));
  Solution s = solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == -5);
  CHECK(s.values[(size_t)x] == Rat64(5));
  CHECK(s.best_bound == -5);
}

TEST_CASE("two variable lattice matches enumeration") {
  Model m;
  int x = m.add_int("x", Bound::at(Rat64(0)), Bound::at(Rat64(10)));
  int y = m.add_int("y", Bound::at(Rat64(0)), Bound::at(Rat64(10)));
  m.set_obj(x, Rat64(-2));
  m.set_obj(y, Rat64(-3));
  m.add_row("r1", Sense::Le, Rat64(7));
  m.row_term(x, Rat64(1));
  m.row_term(y, Rat64(2));
  m.add_row("r2", Sense::Le, Rat64(8));
  m.row_term(x, Rat64(3));
  m.row_term(y, Rat64(1));
  auto expect = lattice_best(m);
  REQUIRE(expect.has_value());
  Solution s = solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == *expect);
  CHECK(m.check_point(s.values).empty());
}

TEST_CASE("knapsack agrees with subset enumeration") {
  Model m = knapsack_model(7, 8);
  auto expect = lattice_best(m);
  REQUIRE(expect.has_value());
  Solution s = solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == *expect);
  CHECK(m.check_point(s.values).empty());
}

TEST_CASE("infeasible by contradictory rows") {
  Model m;
  int x = m.add_int("x", Bound::at(Rat64(0)), Bound::at(Rat64(10)));
  m.add_row("lo", Sense::Ge, Rat64(3));
  m.row_term(x, Rat64(1));
  m.add_row("hi", Sense::Le, Rat64(1));
  m.row_term(x, Rat64(1));
  Solution s = solve(m);
  CHECK(s.status == SolveStatus::Infeasible);
  CHECK_FALSE(s.has_incumbent);
}

TEST_CASE("integer rounding can make a feasible relaxation infeasible") {
  // 2x = 3 has the fractional solution 1.5 but no integer one.
  Model m;
  int x = m.add_int("x", Bound::at(Rat64(0)), Bound::at(Rat64(5)));
  m.add_row("eq", Sense::Eq, Rat64(3));
  m.row_term(x, Rat64(2));
  Solution s = solve(m);
  CHECK(s.status == SolveStatus::Infeasible);
}

TEST_CASE("unbounded continuous and integer") {
  Model m;
  int x = m.add_cont("x", Bound::at(Rat64(0)), Bound::none());
  m.set_obj(x, Rat64(-1));
  CHECK(solve(m).status == SolveStatus::Unbounded);

  Model mi;
  int y = mi.add_int("y", Bound::at(Rat64(0)), Bound::none());
  mi.set_obj(y, Rat64(-1));
  CHECK(solve(mi).status == SolveStatus::Unbounded);
}

TEST_CASE("continuous equality mix") {
  Model m;
  int x = m.add_cont("x", Bound::at(Rat64(0)), Bound::at(Rat64(1)));
  int y = m.add_cont("y", Bound::at(Rat64(0)), Bound::none());
  m.set_obj(x, Rat64(2));
  m.set_obj(y, Rat64(1));
  m.add_row("sum", Sense::Eq, Rat64(3));
  m.row_term(x, Rat64(1));
  m.row_term(y, Rat64(1));
  Solution s = solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == 3);
  CHECK(s.values[(size_t)x] == Rat64(0));
  CHECK(s.values[(size_t)y] == Rat64(3));
}

TEST_CASE("free variable pushed to a row bound") {
  Model m;
  int x = m.add_cont("x", Bound::none(), Bound::none());
  m.set_obj(x, Rat64(1));
  m.add_row("floor", Sense::Ge, Rat64(-2));
  m.row_term(x, Rat64(1));
  Solution s = solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == -2);
}

TEST_CASE("thirds stay exact in rational mode") {
  Model m;
  int x = m.add_cont("x", Bound::at(Rat64(0)), Bound::none());
  m.set_obj(x, Rat64(1));
  m.add_row("r", Sense::Ge, Rat64(1, 3));
  m.row_term(x, Rat64(1, 2));
  Solution s = solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == BigRat(2, 3));
  CHECK(s.values[(size_t)x] == Rat64(2, 3));
}

TEST_CASE("empty and variable-free models") {
  Model empty;
  empty.obj_const = Rat64(7, 2);
  Solution s = solve(empty);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == BigRat(7, 2));

  Model rows_only;
  rows_only.add_row("ok", Sense::Le, Rat64(4));
  CHECK(solve(rows_only).status == SolveStatus::Optimal);

  Model bad;
  bad.add_row("impossible", Sense::Ge, Rat64(1));
  CHECK(solve(bad).status == SolveStatus::Infeasible);
}

TEST_CASE("hints seed the incumbent under a zero node limit") {
  Model m = knapsack_model(11, 10);
  auto expect = lattice_best(m);
  REQUIRE(expect.has_value());

  Solution full = solve(m);
  REQUIRE(full.status == SolveStatus::Optimal);

  SolveOptions opt;
  opt.node_limit = 0;
  opt.hints.push_back(full.values);                       // valid: the optimum itself
  opt.hints.push_back(std::vector<Rat64>((size_t)m.num_vars(), Rat64(100)));  // invalid, ignored
  Solution s = solve(m, opt);
  CHECK(s.status == SolveStatus::NodeLimit);
  REQUIRE(s.has_incumbent);
  CHECK(s.objective == *expect);

  SolveOptions bad_len;
  bad_len.hints.push_back(std::vector<Rat64>(3, Rat64(0)));
  CHECK_THROWS_AS(solve(m, bad_len), std::invalid_argument);
}

TEST_CASE("time limit reports honestly") {
  Model m = knapsack_model(13, 16);
  SolveOptions opt;
  opt.time_limit_s = 0.0;
  Solution s = solve(m, opt);
  CHECK(s.status == SolveStatus::TimeLimit);
}

TEST_CASE("floating mode agrees with rational mode and stays exactly feasible") {
  std::mt19937 rng(2024);
  int solved = 0;
  for (int trial = 0; trial < 30; ++trial) {
    Model m;
    int nv = 2 + (int)(rng() % 3);
    for (int j = 0; j < nv; ++j)
      m.add_int("x" + std::to_string(j), Bound::at(Rat64(0)), Bound::at(Rat64(6)));
    for (int j = 0; j < nv; ++j) m.set_obj(j, Rat64((std::int64_t)(rng() % 11) - 5));
    int nr = 1 + (int)(rng() % 3);
    for (int r = 0; r < nr; ++r) {
      Sense sn = r % 3 == 0 ? Sense::Le : r % 3 == 1 ? Sense::Ge : Sense::Eq;
      m.add_row("c" + std::to_string(r), sn, Rat64((std::int64_t)(rng() % 15) - 2));
      for (int j = 0; j < nv; ++j) {
        std::int64_t c = (std::int64_t)(rng() % 7) - 3;
        if (c != 0) m.row_term(j, Rat64(c));
      }
    }
    Solution exact = solve(m);
    SolveOptions fopt;
    fopt.mode = NumericMode::Floating;
    Solution fl = solve(m, fopt);
    CHECK(exact.status == fl.status);
    if (exact.status == SolveStatus::Optimal) {
      ++solved;
      CHECK(m.check_point(fl.values).empty());
      double gap = std::abs(to_double(exact.objective) - to_double(fl.objective));
      CHECK(gap <= 1e-6);
    }
  }
  CHECK(solved >= 5);  // the generator must not degenerate into all-infeasible
}

TEST_CASE("branch and bound matches lattice enumeration on random models") {
  std::mt19937 rng(4096);
  int feasible_count = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Model m;
    int nv = 2 + (int)(rng() % 3);  // 2..4 vars, range 0..6
    for (int j = 0; j < nv; ++j)
      m.add_int("x" + std::to_string(j), Bound::at(Rat64(0)), Bound::at(Rat64(6)));
    for (int j = 0; j < nv; ++j) m.set_obj(j, Rat64((std::int64_t)(rng() % 13) - 6));
    int nr = 1 + (int)(rng() % 4);
    for (int r = 0; r < nr; ++r) {
      unsigned pick = rng() % 3;
      Sense sn = pick == 0 ? Sense::Le : pick == 1 ? Sense::Ge : Sense::Eq;
      m.add_row("c" + std::to_string(r), sn, Rat64((std::int64_t)(rng() % 21) - 4));
      for (int j = 0; j < nv; ++j) {
        std::int64_t c = (std::int64_t)(rng() % 9) - 4;
        if (c != 0) m.row_term(j, Rat64(c));
      }
    }
    auto expect = lattice_best(m);
    Solution s = solve(m);
    if (expect) {
      ++feasible_count;
      REQUIRE(s.status == SolveStatus::Optimal);
      CHECK(s.objective == *expect);
      CHECK(m.check_point(s.values).empty());
    } else {
      CHECK(s.status == SolveStatus::Infeasible);
    }
  }
  CHECK(feasible_count >= 10);
}

TEST_CASE("lp writer emits the documented shape") {
  Model m;
  int x = m.add_int("x", Bound::at(Rat64(0)), Bound::at(Rat64(5)));
  int y = m.add_cont("y", Bound::none(), Bound::none());
  int b = m.add_bin("flag");
  int z = m.add_cont("z", Bound::none(), Bound::at(Rat64(4)));
  int w = m.add_cont("w", Bound::at(Rat64(2)), Bound::at(Rat64(2)));
  m.set_obj(x, Rat64(2));
  m.set_obj(y, Rat64(-1));
  m.add_row("c1", Sense::Le, Rat64(4));
  m.row_term(x, Rat64(1));
  m.row_term(y, Rat64(3, 2));
  m.add_row("c2", Sense::Ge, Rat64(-1));
  m.row_term(y, Rat64(-1));
  m.row_term(b, Rat64(1));
  m.add_row("c3", Sense::Eq, Rat64(2));
  m.row_term(z, Rat64(1));
  m.row_term(w, Rat64(1));
  (void)x; (void)y; (void)b; (void)z; (void)w;

  std::string text = lp_string(m);
  CHECK(text ==
        "Minimize\n"
        " obj: 2 x - y\n"
        "Subject To\n"
        " c1: x + 1.5 y <= 4\n"
        " c2: - y + flag >= -1\n"
        " c3: z + w = 2\n"
        "Bounds\n"
        " x <= 5\n"
        " y free\n"
        " -infinity <= z <= 4\n"
        " w = 2\n"
        "Generals\n"
        " x\n"
        "Binaries\n"
        " flag\n"
        "End\n");

  // byte-identical round trip for exactly representable coefficients
  std::istringstream in(text);
  Model m2 = parse_lp(in);
  CHECK(lp_string(m2) == text);
}

TEST_CASE("lp round trip is idempotent and solution-equivalent with thirds") {
  Model m;
  int x = m.add_cont("x", Bound::at(Rat64(0)), Bound::at(Rat64(9)));
  int y = m.add_int("y", Bound::at(Rat64(0)), Bound::at(Rat64(4)));
  m.set_obj(x, Rat64(1, 3));  // repeating decimal forces the approximate path
  m.set_obj(y, Rat64(1));
  m.add_row("r1", Sense::Ge, Rat64(5, 3));
  m.row_term(x, Rat64(1));
  m.row_term(y, Rat64(2, 3));
  std::string w1 = lp_string(m);
  std::istringstream i1(w1);
  Model p1 = parse_lp(i1);
  std::string w2 = lp_string(p1);
  std::istringstream i2(w2);
  Model p2 = parse_lp(i2);
  std::string w3 = lp_string(p2);
  CHECK(w2 == w3);
  Solution a = solve(m), bsol = solve(p2);
  REQUIRE(a.status == SolveStatus::Optimal);
  REQUIRE(bsol.status == SolveStatus::Optimal);
  CHECK(std::abs(to_double(a.objective) - to_double(bsol.objective)) < 1e-9);
}

TEST_CASE("lp parser accepts format variants and rejects bad input") {
  {
    std::istringstream in(
        "minimize\n obj: x + 2 y\nst\n a: x + y >= 2\n b: x - y <= 1\nbounds\n"
        " 0.5 <= x <= 3\n y >= -infinity\nend\n");
    Model m = parse_lp(in);
    CHECK(m.num_vars() == 2);
    CHECK(m.num_rows() == 2);
    CHECK(m.lb[0].value == Rat64(1, 2));
    CHECK_FALSE(m.lb[1].finite);
  }
  {
    std::istringstream in("Maximize\n obj: x\nSubject To\n c: x <= 1\nEnd\n");
    CHECK_THROWS_AS(parse_lp(in), LpParseError);
  }
  {
    std::istringstream in("Minimize\n obj: x\nSubject To\n c: x ! 1\nEnd\n");
    CHECK_THROWS_AS(parse_lp(in), LpParseError);
  }
  {
    // negative rhs and constants folded from the left side
    std::istringstream in(
        "Minimize\n obj: x\nSubject To\n c: x + 2 >= -1\nEnd\n");
    Model m = parse_lp(in);
    REQUIRE(m.num_rows() == 1);
    CHECK(m.rows[0].rhs == Rat64(-3));
    Solution s = solve(m);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == 0);  // default lower bound 0 binds, row is slack
  }
}

TEST_CASE("solution files parse with status, comments and defaults") {
  std::istringstream in(
      "# produced externally\n"
      "status optimal\n"
      "objective -5\n"
      "x 5\n"
      "y 0.25  # trailing comment\n");
  ParsedSolution ps = parse_solution(in);
  CHECK(ps.status == "optimal");
  CHECK(ps.has_objective);
  CHECK(ps.objective == Rat64(-5));
  REQUIRE(ps.values.size() == 2);
  CHECK(ps.values[1].second == Rat64(1, 4));

  std::istringstream bad("x 1 2\n");
  CHECK_THROWS_AS(parse_solution(bad), LpParseError);
}

TEST_CASE("adapter runs an external command and cross-checks it") {
  Model m;
  int x = m.add_int("x", Bound::at(Rat64(0)), Bound::at(Rat64(5)));
  m.set_obj(x, Rat64(-1));
  (void)x;

  SUBCASE("agreeing solver is accepted") {
    AdapterConfig cfg;
    cfg.command = "printf 'status optimal\\nobjective -5\\nx 5\\n' > {out} && test -f {lp}";
    Solution s = solve_with_adapter(m, cfg);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == -5);
    CHECK(s.values[0] == Rat64(5));
  }
  SUBCASE("wrong objective is surfaced, not accepted") {
    AdapterConfig cfg;
    cfg.command = "printf 'status optimal\\nobjective -4\\nx 4\\n' > {out}";
    CHECK_THROWS_AS(solve_with_adapter(m, cfg), SolverError);
  }
  SUBCASE("false infeasible claim is surfaced") {
    AdapterConfig cfg;
    cfg.command = "printf 'status infeasible\\n' > {out}";
    CHECK_THROWS_AS(solve_with_adapter(m, cfg), SolverError);
  }
  SUBCASE("infeasible solution vector is surfaced") {
    AdapterConfig cfg;
    cfg.command = "printf 'status optimal\\nobjective -7\\nx 7\\n' > {out}";
    CHECK_THROWS_AS(solve_with_adapter(m, cfg), SolverError);
  }
  SUBCASE("failing command is surfaced") {
    AdapterConfig cfg;
    cfg.command = "false # {lp} {out}";
    CHECK_THROWS_AS(solve_with_adapter(m, cfg), SolverError);
  }
  SUBCASE("agreeing infeasible claim is accepted") {
    Model bad;
    bad.add_int("x", Bound::at(Rat64(0)), Bound::at(Rat64(10)));
    bad.add_row("lo", Sense::Ge, Rat64(3));
    bad.row_term(0, Rat64(1));
    bad.add_row("hi", Sense::Le, Rat64(1));
    bad.row_term(0, Rat64(1));
    AdapterConfig cfg;
    cfg.command = "printf 'status infeasible\\n' > {out}";
    Solution s = solve_with_adapter(bad, cfg);
    CHECK(s.status == SolveStatus::Infeasible);
  }
}

TEST_CASE("near integer external values are snapped before checking") {
  Model m;
  int x = m.add_int("x", Bound::at(Rat64(0)), Bound::at(Rat64(5)));
  m.set_obj(x, Rat64(-1));
  (void)x;
  AdapterConfig cfg;
  cfg.command = "printf 'status optimal\\nobjective -5\\nx 4.9999999\\n' > {out}";
  Solution s = solve_with_adapter(m, cfg);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.values[0] == Rat64(5));
}
