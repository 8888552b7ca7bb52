#include <doctest.h>

#include <random>

#include "../support/random.hpp"
#include "softcore/maxsat/drivers.hpp"
#include "softcore/oracle/oracle.hpp"

using namespace softcore;
using maxsat::Algorithm;
using maxsat::Status;

namespace {

constexpr Algorithm kAll[] = {Algorithm::kBnb, Algorithm::kWpm1, Algorithm::kMsu3};

void check_cores(const maxsat::SoftInstance& inst, const maxsat::OptimizeResult& r) {
  for (const auto& core : r.cores) {
    if (core.bounded) {
      CHECK(oracle::verify_core_bounded(inst, core.ids, core.bound));
    } else {
      CHECK(oracle::verify_core(inst, core.ids));
    }
  }
}

}  // namespace

TEST_CASE("property: every driver returns the oracle optimum with a matching model") {
  std::mt19937_64 rng(424242);
  for (int round = 0; round < 150; ++round) {
    const auto inst = testing::random_wcnf(rng);
    const auto expected = oracle::brute_force_maxsat(inst);
    CAPTURE(round);
    CAPTURE(maxsat::serialize_wcnf(inst));
    REQUIRE((!expected.optimum || maxsat::cost(inst, expected.witness) == expected.optimum));
    for (Algorithm a : kAll) {
      CAPTURE(maxsat::to_string(a));
      const auto r = maxsat::solve(a, inst);
      if (!expected.optimum) {
        CHECK(r.status == Status::kUnsatisfiable);
        continue;
      }
      REQUIRE(r.status == Status::kOptimal);
      CHECK(r.z == expected.optimum);
      CHECK(maxsat::cost(inst, maxsat::assignment(r, inst.num_vars)) == expected.optimum);
      check_cores(inst, r);
    }
  }
}

TEST_CASE("property: incumbents strictly decrease and end at the optimum") {
  std::mt19937_64 rng(77);
  for (int round = 0; round < 80; ++round) {
    const auto inst = testing::random_wcnf(rng);
    for (Algorithm a : {Algorithm::kBnb, Algorithm::kMsu3}) {
      const auto r = maxsat::solve(a, inst);
      if (r.status != Status::kOptimal) continue;
      REQUIRE_FALSE(r.incumbents.empty());
      for (std::size_t k = 1; k < r.incumbents.size(); ++k) CHECK(r.incumbents[k] < r.incumbents[k - 1]);
      CHECK(r.incumbents.back() == r.z);
    }
  }
}

TEST_CASE("property: wpm1 z_min never exceeds the optimum and rounds account for it") {
  std::mt19937_64 rng(1234);
  for (int round = 0; round < 120; ++round) {
    const auto inst = testing::random_wcnf(rng);
    const auto expected = oracle::brute_force_maxsat(inst).optimum;
    const auto r = maxsat::solve(Algorithm::kWpm1, inst);
    if (!expected) continue;
    REQUIRE(r.status == Status::kOptimal);
    maxsat::Weight running = 0;
    for (const auto& rd : r.rounds) {
      CHECK(rd.w_min > 0);
      CHECK(rd.relaxed >= rd.core.size());
      running += rd.w_min;
      CHECK(rd.z_min == running);
      CHECK(rd.z_min <= *expected);
    }
    CHECK(running == *expected);
    CHECK(r.lower_bound == *expected);
  }
}

TEST_CASE("property: counter encoding of the objective bound agrees with the propagator") {
  std::mt19937_64 rng(99);
  maxsat::DriverOptions counter;
  counter.pb_encoding = maxsat::PbEncoding::kCounter;
  for (int round = 0; round < 60; ++round) {
    const auto inst = testing::random_wcnf(rng);
    for (Algorithm a : {Algorithm::kBnb, Algorithm::kMsu3}) {
      const auto p = maxsat::solve(a, inst);
      const auto c = maxsat::solve(a, inst, counter);
      CHECK(p.status == c.status);
      CHECK(p.z == c.z);
    }
  }
}

TEST_CASE("property: solving is deterministic") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 30; ++round) {
    const auto inst = testing::random_wcnf(rng);
    for (Algorithm a : kAll) {
      const auto r1 = maxsat::solve(a, inst);
      const auto r2 = maxsat::solve(a, inst);
      CHECK(r1.z == r2.z);
      CHECK(r1.incumbents == r2.incumbents);
      CHECK(r1.stats.conflicts == r2.stats.conflicts);
      CHECK(r1.stats.ticks == r2.stats.ticks);
      CHECK(r1.cores.size() == r2.cores.size());
    }
  }
}
