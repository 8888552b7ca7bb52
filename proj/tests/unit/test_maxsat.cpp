#include <set>

#include "doctest.h"
#include "softcore/maxsat/drivers.hpp"
#include "softcore/oracle/oracle.hpp"
#include "../support/examples.hpp"

using namespace softcore;
using maxsat::Algorithm;
using maxsat::Status;

namespace {

std::set<int> as_set(const std::vector<int>& v) { return {v.begin(), v.end()}; }

const Algorithm kAll[] = {Algorithm::kBnb, Algorithm::kWpm1, Algorithm::kMsu3};

}  // namespace

TEST_CASE("parse_wcnf reads example 1") {
  const auto inst = maxsat::parse_wcnf(testing::kExample1);
  CHECK(inst.num_vars == 3);
  CHECK(inst.top == 6);
  REQUIRE(inst.clauses.size() == 5);
  CHECK(inst.num_soft() == 5);
  CHECK(inst.clauses[3].lits == std::vector<sat::Lit>{sat::Lit(1, true), sat::Lit(2, true)});
}

TEST_CASE("weight equal to top is hard") {
  const auto inst = maxsat::parse_wcnf("p wcnf 1 1 5\n5 1 0\n");
  CHECK(inst.is_hard(0));
  CHECK(inst.num_soft() == 0);
}

TEST_CASE("parse errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      maxsat::parse_wcnf(text);
    } catch (const maxsat::ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("p cnf 1 1\n1 0\n") == 1);
  CHECK(line_of("p wcnf 2 1 9\nc comment\n0 1 0\n") == 3);
  CHECK(line_of("p wcnf 2 1 9\n1 3 0\n") == 2);
  CHECK(line_of("p wcnf 2 1 9\n1 1 2\n") == 2);
  CHECK(line_of("p wcnf 2 1 9\n10 1 0\n") == 2);
  CHECK(line_of("1 1 0\n") == 1);
  CHECK(line_of("p wcnf 2 2 9\n1 1 0\n") > 0);
  CHECK(line_of("p wcnf 2 1 9\n1 x 0\n") == 2);
}

TEST_CASE("serialize round-trips") {
  const auto inst = maxsat::parse_wcnf("c hi\np wcnf 4 3 20\n20 1 -2 0\n3 4 0\n7 -1 -3 -4 0\n");
  CHECK(maxsat::parse_wcnf(maxsat::serialize_wcnf(inst)) == inst);
}

TEST_CASE("example 1: every driver finds cost 1") {
  const auto inst = maxsat::parse_wcnf(testing::kExample1);
  for (Algorithm a : kAll) {
    CAPTURE(maxsat::to_string(a));
    const auto r = maxsat::solve(a, inst);
    REQUIRE(r.status == Status::kOptimal);
    CHECK(*r.z == 1);
    const auto x = maxsat::assignment(r, 3);
    CHECK(*maxsat::cost(inst, x) == 1);
  }
  // The unique cost-1 model.
  const auto x = maxsat::assignment(maxsat::solve_bnb(inst), 3);
  CHECK(!x[1]);
  CHECK(x[2]);
  CHECK(x[3]);
}

TEST_CASE("example 3: wpm1 core sequence") {
  const auto inst = maxsat::parse_wcnf(testing::kExample3);
  const auto r = maxsat::solve_wpm1(inst);
  REQUIRE(r.status == Status::kOptimal);
  CHECK(*r.z == 2);
  REQUIRE(r.cores.size() == 2);
  CHECK(as_set(r.cores[0].ids) == std::set<int>{0, 2, 4});
  CHECK(as_set(r.cores[1].ids) == std::set<int>{0, 1, 2, 3, 5, 6});
  REQUIRE(r.rounds.size() == 2);
  CHECK(r.rounds[0].z_min == 1);
  CHECK(r.rounds[1].z_min == 2);
  CHECK(*maxsat::cost(inst, maxsat::assignment(r, 4)) == 2);
}

TEST_CASE("example 1: msu3 trace") {
  const auto inst = maxsat::parse_wcnf(testing::kExample1);
  const auto r = maxsat::solve_msu3(inst);
  REQUIRE(r.status == Status::kOptimal);
  REQUIRE(r.cores.size() == 2);
  CHECK(as_set(r.cores[0].ids) == std::set<int>{0, 1, 3});
  CHECK_FALSE(r.cores[0].bounded);
  REQUIRE_FALSE(r.incumbents.empty());
  CHECK(r.incumbents.back() == 1);
  CHECK(r.cores[1].ids.empty());
  CHECK(r.cores[1].bounded);
  CHECK(*r.z == 1);
}

TEST_CASE("hard contradiction is unsatisfiable for every driver") {
  const auto inst = maxsat::parse_wcnf("p wcnf 2 3 10\n10 1 0\n10 -1 0\n1 2 0\n");
  for (Algorithm a : kAll) {
    const auto r = maxsat::solve(a, inst);
    CHECK(r.status == Status::kUnsatisfiable);
    CHECK_FALSE(r.z.has_value());
  }
  const auto r = maxsat::solve_bnb(inst);
  CHECK(r.stats.solves == 1);
}

TEST_CASE("satisfiable instance costs zero") {
  const auto inst = maxsat::parse_wcnf("p wcnf 3 3 10\n1 1 0\n2 2 0\n3 -3 0\n");
  for (Algorithm a : kAll) {
    const auto r = maxsat::solve(a, inst);
    REQUIRE(r.status == Status::kOptimal);
    CHECK(*r.z == 0);
  }
  CHECK(maxsat::solve_wpm1(inst).rounds.empty());
  const auto m = maxsat::solve_msu3(inst);
  CHECK(m.incumbents == std::vector<maxsat::Weight>{0});
  REQUIRE(m.cores.size() == 1);
  CHECK(m.cores[0].ids.empty());
}

TEST_CASE("wpm1 splits weights") {
  // x1 weight 5 against -x1 weight 2: optimum 2.
  const auto inst = maxsat::parse_wcnf("p wcnf 1 2 100\n5 1 0\n2 -1 0\n");
  const auto r = maxsat::solve_wpm1(inst);
  REQUIRE(r.status == Status::kOptimal);
  CHECK(*r.z == 2);
  REQUIRE(r.rounds.size() == 1);
  CHECK(r.rounds[0].w_min == 2);
  CHECK(r.rounds[0].relaxed == 2);
  CHECK(*maxsat::solve_bnb(inst).z == 2);
  CHECK(*maxsat::solve_msu3(inst).z == 2);
}

TEST_CASE("counter encoding gives the same optimum") {
  const auto inst = maxsat::parse_wcnf(testing::kExample3);
  maxsat::DriverOptions opts;
  opts.pb_encoding = maxsat::PbEncoding::kCounter;
  CHECK(*maxsat::solve_bnb(inst, opts).z == 2);
  CHECK(*maxsat::solve_msu3(inst, opts).z == 2);
}

TEST_CASE("incumbent callback sees every objective") {
  const auto inst = maxsat::parse_wcnf(testing::kExample3);
  std::vector<maxsat::Weight> seen;
  maxsat::DriverOptions opts;
  opts.on_incumbent = [&](maxsat::Weight z) { seen.push_back(z); };
  const auto r = maxsat::solve_bnb(inst, opts);
  CHECK(seen == r.incumbents);
  for (std::size_t k = 1; k < seen.size(); ++k) CHECK(seen[k] < seen[k - 1]);
}

TEST_CASE("tiny tick budget yields unknown with a valid lower bound") {
  std::string text = "p wcnf 12 0 1000\n";
  maxsat::SoftInstance inst;
  inst.num_vars = 12;
  inst.top = 1000;
  for (int a = 1; a <= 12; ++a) {
    inst.clauses.push_back({{sat::Lit(a, false)}, 1});
    for (int b = a + 1; b <= 12; ++b) inst.clauses.push_back({{sat::Lit(a, true), sat::Lit(b, true)}, 1000});
  }
  maxsat::DriverOptions opts;
  opts.tick_limit = 50;
  for (Algorithm a : kAll) {
    const auto r = maxsat::solve(a, inst, opts);
    CHECK(r.status == Status::kUnknown);
    CHECK(r.lower_bound <= 11);
  }
}

TEST_CASE("wrap_indicators") {
  sat::Engine engine;
  const auto i1 = engine.new_bool_var();
  const auto i2 = engine.new_bool_var();
  const auto i3 = engine.new_bool_var();
  std::vector<std::pair<sat::Lit, maxsat::Weight>> ind{{i1, 1}, {i2, 1}, {i1, 2}};
  CHECK_THROWS_AS(maxsat::wrap_indicators(ind), std::invalid_argument);
  ind = {{i1, 0}};
  CHECK_THROWS_AS(maxsat::wrap_indicators(ind), std::invalid_argument);

  SUBCASE("compatible indicators cost nothing") {
    ind = {{i1, 1}, {i2, 1}, {i3, 1}};
    for (Algorithm a : kAll) {
      sat::Engine e;
      for (int k = 0; k < 3; ++k) e.new_bool_var();
      const auto softs = maxsat::wrap_indicators(ind);
      const auto r = maxsat::solve(a, e, softs);
      CHECK(*r.z == 0);
    }
  }
  SUBCASE("exclusive indicators cost the lighter weight") {
    ind = {{i1, 3}, {i2, 2}};
    for (Algorithm a : kAll) {
      sat::Engine e;
      for (int k = 0; k < 3; ++k) e.new_bool_var();
      e.add_clause({~i1, ~i2});
      const auto softs = maxsat::wrap_indicators(ind);
      const auto r = maxsat::solve(a, e, softs);
      REQUIRE(r.status == Status::kOptimal);
      CHECK(*r.z == 2);
      CHECK(r.value(i1));
    }
  }
}

TEST_CASE("output format") {
  const auto inst = maxsat::parse_wcnf(testing::kExample1);
  const auto r = maxsat::solve_wpm1(inst);
  CHECK(maxsat::format_result(r, 3) == "o 1\ns OPTIMUM FOUND\nv -1 2 3\n");
  maxsat::OptimizeResult u;
  u.status = Status::kUnsatisfiable;
  CHECK(maxsat::format_result(u, 3) == "s UNSATISFIABLE\n");
}
