#include <doctest.h>

#include <algorithm>
#include <random>

#include "softcore/cp/model.hpp"

using namespace softcore;
using cp::IntVar;
using cp::Model;
using sat::Engine;
using sat::Lit;
using sat::SolveStatus;

namespace {

// Assumptions fixing x to v.
void fix(Model& m, IntVar x, int v, std::vector<Lit>& out) {
  out.push_back(m.lit_geq(x, v));
  out.push_back(m.lit_leq(x, v));
}

bool sorted_equal(std::vector<Lit> a, std::vector<Lit> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

}  // namespace

TEST_CASE("bound literals clamp to constants outside the domain") {
  Engine e;
  Model m(e);
  const IntVar x = m.new_int_var(0, 10);
  CHECK(m.lit_geq(x, 0) == sat::kTrue);
  CHECK(m.lit_geq(x, -3) == sat::kTrue);
  CHECK(m.lit_geq(x, 11) == sat::kFalse);
  CHECK(m.lit_leq(x, 10) == sat::kTrue);
  CHECK(m.lit_eq(x, 11) == sat::kFalse);
  CHECK(m.num_bound_lits(x) == 0);
  const Lit g5 = m.lit_geq(x, 5);
  CHECK(m.lit_geq(x, 5) == g5);
  CHECK(m.num_bound_lits(x) == 1);
}

TEST_CASE("fixed domain and empty domain") {
  Engine e;
  Model m(e);
  const IntVar x = m.new_int_var(5, 5);
  CHECK(m.lit_geq(x, 5) == sat::kTrue);
  CHECK(m.lit_geq(x, 6) == sat::kFalse);
  CHECK(m.lb(x) == 5);
  CHECK(m.ub(x) == 5);
  CHECK_THROWS_AS(m.new_int_var(3, 2), std::invalid_argument);
}

TEST_CASE("channeling: x >= 7 implies x >= 4") {
  Engine e;
  Model m(e);
  const IntVar x = m.new_int_var(0, 10);
  const Lit g4 = m.lit_geq(x, 4);
  const Lit g7 = m.lit_geq(x, 7);
  e.add_clause({g7});
  CHECK(e.is_true(g4));
  CHECK(m.lb(x) == 7);
  CHECK(m.lb_lit(x) == g7);
  // Literals created after the fact are channelled too.
  CHECK(e.is_true(m.lit_geq(x, 6)));
  CHECK(e.value(m.lit_geq(x, 8)) == sat::LBool::kUndef);
}

TEST_CASE("equality literal decodes") {
  Engine e;
  Model m(e);
  const IntVar x = m.new_int_var(2, 6);
  const auto out = e.solve({m.lit_eq(x, 4)});
  REQUIRE(out.status == SolveStatus::kSat);
  CHECK(m.value(x, out) == 4);
  CHECK(e.solve({m.lit_eq(x, 4), m.lit_eq(x, 5)}).status == SolveStatus::kUnsat);
}

TEST_CASE("half-reified precedence infers with an explanation") {
  Engine e;
  Model m(e);
  const IntVar s1 = m.new_int_var(0, 9);
  const IntVar s2 = m.new_int_var(0, 20);
  const Lit i = e.new_bool_var();
  m.post_half_reified_linear(i, {{1, s2}, {-1, s1}}, 3);
  const Lit s1_ge4 = m.lit_geq(s1, 4);
  e.add_clause({s1_ge4});
  CHECK(m.lb(s2) == 0);
  e.add_clause({i});
  CHECK(m.lb(s2) == 7);
  const Lit s2_ge7 = m.lit_geq(s2, 7);
  const auto why = e.reason(s2_ge7.var());
  REQUIRE(why.has_value());
  CHECK(sorted_equal(*why, {~i, ~s1_ge4, s2_ge7}));
}

TEST_CASE("half-reified precedence without its indicator does nothing") {
  Engine e;
  Model m(e);
  const IntVar s1 = m.new_int_var(4, 9);
  const IntVar s2 = m.new_int_var(0, 20);
  const Lit i = e.new_bool_var();
  m.post_half_reified_linear(i, {{1, s2}, {-1, s1}}, 3);
  CHECK(m.lb(s2) == 0);
  CHECK(e.value(i) == sat::LBool::kUndef);
}

TEST_CASE("half-reified precedence conflicts exactly when max(s2) - min(s1) < 3") {
  for (int lo1 = 0; lo1 <= 6; ++lo1) {
    for (int hi2 = 0; hi2 <= 8; ++hi2) {
      Engine e;
      Model m(e);
      const IntVar s1 = m.new_int_var(lo1, 9);
      const IntVar s2 = m.new_int_var(0, hi2);
      const Lit i = e.new_bool_var();
      m.post_half_reified_linear(i, {{1, s2}, {-1, s1}}, 3);
      CAPTURE(lo1);
      CAPTURE(hi2);
      const bool conflict = e.solve({i}).status == SolveStatus::kUnsat;
      CHECK(conflict == (hi2 - lo1 < 3));
      // Without the indicator the constraint can always be dropped.
      CHECK(e.solve().status == SolveStatus::kSat);
    }
  }
}

TEST_CASE("linear with a root-false indicator is dropped and empty terms are rejected") {
  Engine e;
  Model m(e);
  const IntVar x = m.new_int_var(0, 3);
  m.post_half_reified_linear(sat::kFalse, {{1, x}}, 100);
  CHECK(e.solve().status == SolveStatus::kSat);
  CHECK_THROWS_AS(m.post_half_reified_linear(sat::kTrue, {}, 1), std::invalid_argument);
  m.post_linear({{1, x}}, 4);
  CHECK_FALSE(e.ok());
}

TEST_CASE("at-most-one posts pairwise clauses") {
  Engine e;
  Model m(e);
  std::vector<Lit> vs;
  for (int k = 0; k < 5; ++k) vs.push_back(e.new_bool_var());
  const std::vector<Lit> group{vs[0], vs[2], vs[4]};
  const auto handles = m.post_at_most_one(group);
  REQUIRE(handles.size() == 3);
  std::vector<std::vector<Lit>> got;
  for (auto h : handles) got.push_back(*e.clause(h));
  for (auto& c : got) std::sort(c.begin(), c.end());
  std::sort(got.begin(), got.end());
  std::vector<std::vector<Lit>> want{{~vs[0], ~vs[2]}, {~vs[0], ~vs[4]}, {~vs[2], ~vs[4]}};
  for (auto& c : want) std::sort(c.begin(), c.end());
  std::sort(want.begin(), want.end());
  CHECK(got == want);
  CHECK(e.solve({vs[0], vs[2]}).status == SolveStatus::kUnsat);
  CHECK(e.solve({vs[0], vs[1]}).status == SolveStatus::kSat);
  CHECK(m.post_at_most_one(std::vector<Lit>{vs[1]}).empty());
}

TEST_CASE("pb bound 1 over unit weights forces everything false") {
  Engine e;
  Model m(e);
  std::vector<cp::PbTerm> terms;
  for (int k = 0; k < 5; ++k) terms.push_back({1, e.new_bool_var()});
  m.post_pb_upper_bound(terms, 1);
  for (const auto& t : terms) CHECK(e.is_false(t.lit));
}

TEST_CASE("pb bound forces the remaining literal false") {
  Engine e;
  Model m(e);
  const Lit a = e.new_bool_var();
  const Lit b = e.new_bool_var();
  m.post_pb_upper_bound({{3, a}, {2, b}}, 4);
  e.add_clause({a});
  CHECK(e.is_false(b));
  const auto why = e.reason(b.var());
  REQUIRE(why.has_value());
  CHECK(sorted_equal(*why, {~a, ~b}));
}

TEST_CASE("pb: two of three weight-2 literals under bound 5") {
  Engine e;
  Model m(e);
  const Lit a = e.new_bool_var();
  const Lit b = e.new_bool_var();
  const Lit c = e.new_bool_var();
  m.post_pb_upper_bound({{2, a}, {2, b}, {2, c}}, 5);
  CHECK(e.solve({a, b, c}).status == SolveStatus::kUnsat);
  e.add_clause({a});
  e.add_clause({b});
  CHECK(e.is_false(c));
}

TEST_CASE("pb rejects bad weights and bounds") {
  Engine e;
  Model m(e);
  const Lit a = e.new_bool_var();
  CHECK_THROWS_AS(m.post_pb_upper_bound({{0, a}}, 3), std::invalid_argument);
  CHECK_THROWS_AS(m.post_pb_upper_bound({{1, a}}, -1), std::invalid_argument);
}

TEST_CASE("pb bound tightening at the root") {
  Engine e;
  Model m(e);
  const Lit a = e.new_bool_var();
  const Lit b = e.new_bool_var();
  auto& pb = m.post_pb_upper_bound({{3, a}, {2, b}}, 10);
  CHECK(e.solve({a, b}).status == SolveStatus::kSat);
  pb.set_bound(5);
  CHECK(e.solve({a, b}).status == SolveStatus::kUnsat);
  CHECK(e.solve({a}).status == SolveStatus::kSat);
}

TEST_CASE("cumulative: two unit-demand tasks of length 3 on capacity 1 in [0,2]") {
  for (int capacity : {1, 2}) {
    Engine e;
    Model m(e);
    const IntVar a = m.new_int_var(0, 2);
    const IntVar b = m.new_int_var(0, 2);
    const bool root = m.post_cumulative({{a, 3, 1}, {b, 3, 1}}, capacity);
    // Starts in [0,2] are at most 2 apart, so the tasks always overlap.
    CAPTURE(capacity);
    const bool sat = root && e.solve().status == SolveStatus::kSat;
    CHECK(sat == (capacity == 2));
  }
}

TEST_CASE("cumulative: demand above capacity is a root conflict") {
  Engine e;
  Model m(e);
  const IntVar a = m.new_int_var(0, 5);
  CHECK_FALSE(m.post_cumulative({{a, 2, 3}}, 2));
  CHECK_FALSE(e.ok());
  CHECK_THROWS_AS(m.post_cumulative({{a, 2, 1}}, 0), std::invalid_argument);
}

TEST_CASE("cumulative: compulsory part pushes a later task") {
  Engine e;
  Model m(e);
  const IntVar a = m.new_int_var(0, 1);
  const IntVar b = m.new_int_var(0, 10);
  REQUIRE(m.post_cumulative({{a, 4, 1}, {b, 2, 1}}, 1));
  e.add_clause({m.lit_leq(b, 2)});
  // a occupies [1,4) in every schedule, so b (length 2) cannot start at 0..2.
  CHECK_FALSE(e.ok());
}

TEST_CASE("property: half-reified linear matches its semantics") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 60; ++round) {
    std::uniform_int_distribution<int> lo(0, 3);
    std::uniform_int_distribution<int> coef(-3, 3);
    Engine e;
    Model m(e);
    std::vector<IntVar> xs;
    for (int k = 0; k < 2; ++k) {
      const int l = lo(rng);
      xs.push_back(m.new_int_var(l, l + 3));
    }
    int c0 = coef(rng), c1 = coef(rng);
    if (c0 == 0) c0 = 1;
    const int rhs = std::uniform_int_distribution<int>(-6, 8)(rng);
    const Lit i = e.new_bool_var();
    m.post_half_reified_linear(i, {{c0, xs[0]}, {c1, xs[1]}}, rhs);
    for (int v0 = m.initial_lb(xs[0]); v0 <= m.initial_ub(xs[0]); ++v0) {
      for (int v1 = m.initial_lb(xs[1]); v1 <= m.initial_ub(xs[1]); ++v1) {
        for (bool on : {false, true}) {
          std::vector<Lit> as;
          fix(m, xs[0], v0, as);
          fix(m, xs[1], v1, as);
          as.push_back(on ? i : ~i);
          const bool expected = !on || c0 * v0 + c1 * v1 >= rhs;
          CHECK((e.solve(as).status == SolveStatus::kSat) == expected);
        }
      }
    }
  }
}

TEST_CASE("property: channeling decodes a unique in-domain value") {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 100; ++round) {
    Engine e;
    Model m(e);
    const int l = std::uniform_int_distribution<int>(-5, 5)(rng);
    const int u = l + std::uniform_int_distribution<int>(0, 8)(rng);
    const IntVar x = m.new_int_var(l, u);
    for (int v = l - 1; v <= u + 1; ++v) m.lit_geq(x, v);
    std::vector<Lit> as;
    for (int k = 0; k < 3; ++k) {
      const int v = std::uniform_int_distribution<int>(l - 1, u + 1)(rng);
      const Lit g = m.lit_geq(x, v);
      as.push_back(std::bernoulli_distribution(0.5)(rng) ? g : ~g);
    }
    const auto out = e.solve(as);
    if (out.status != SolveStatus::kSat) continue;
    const int val = m.value(x, out);
    CHECK(val >= l);
    CHECK(val <= u);
    for (int v = l - 1; v <= u + 1; ++v) CHECK(out.value(m.lit_geq(x, v)) == (val >= v));
  }
}

TEST_CASE("property: pb propagator and counter encoding agree on every assignment") {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 80; ++round) {
    const int n = std::uniform_int_distribution<int>(1, 6)(rng);
    std::vector<std::int64_t> weights;
    std::int64_t total = 0;
    for (int k = 0; k < n; ++k) {
      weights.push_back(std::uniform_int_distribution<int>(1, 5)(rng));
      total += weights.back();
    }
    const std::int64_t bound = std::uniform_int_distribution<std::int64_t>(0, total + 1)(rng);
    Engine ep, ec;
    Model mp(ep);
    std::vector<cp::PbTerm> tp, tc;
    for (int k = 0; k < n; ++k) {
      tp.push_back({weights[k], ep.new_bool_var()});
      tc.push_back({weights[k], ec.new_bool_var()});
    }
    mp.post_pb_upper_bound(tp, bound);
    cp::encode_pb_upper_bound(ec, tc, bound);
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
      std::vector<Lit> ap, ac;
      std::int64_t sum = 0;
      for (int k = 0; k < n; ++k) {
        const bool on = (mask >> k) & 1U;
        sum += on ? weights[k] : 0;
        ap.push_back(on ? tp[k].lit : ~tp[k].lit);
        ac.push_back(on ? tc[k].lit : ~tc[k].lit);
      }
      const bool expected = sum < bound;
      CAPTURE(round);
      CAPTURE(mask);
      CHECK((ep.solve(ap).status == SolveStatus::kSat) == expected);
      CHECK((ec.solve(ac).status == SolveStatus::kSat) == expected);
    }
  }
}

TEST_CASE("property: cumulative accepts exactly the resource-feasible schedules") {
  std::mt19937_64 rng(23);
  for (int round = 0; round < 60; ++round) {
    const int n = std::uniform_int_distribution<int>(1, 3)(rng);
    const int capacity = std::uniform_int_distribution<int>(1, 3)(rng);
    const int horizon = 5;
    Engine e;
    Model m(e);
    std::vector<cp::Task> tasks;
    for (int k = 0; k < n; ++k) {
      const int dur = std::uniform_int_distribution<int>(0, 3)(rng);
      const int dem = std::uniform_int_distribution<int>(0, capacity)(rng);
      tasks.push_back({m.new_int_var(0, horizon - 1), dur, dem});
    }
    const bool root = m.post_cumulative(tasks, capacity);
    REQUIRE(root);
    int combos = 1;
    for (int k = 0; k < n; ++k) combos *= horizon;
    for (int c = 0; c < combos; ++c) {
      std::vector<int> starts(n);
      std::vector<Lit> as;
      for (int k = 0, r = c; k < n; ++k, r /= horizon) {
        starts[k] = r % horizon;
        fix(m, tasks[k].start, starts[k], as);
      }
      bool feasible = true;
      for (int t = 0; t < horizon + 3; ++t) {
        int load = 0;
        for (int k = 0; k < n; ++k) {
          if (starts[k] <= t && t < starts[k] + tasks[k].duration) load += tasks[k].demand;
        }
        feasible = feasible && load <= capacity;
      }
      CAPTURE(round);
      CAPTURE(c);
      CHECK((e.solve(as).status == SolveStatus::kSat) == feasible);
    }
  }
}
