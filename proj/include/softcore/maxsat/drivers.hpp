#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "softcore/maxsat/instance.hpp"
#include "softcore/sat/engine.hpp"

namespace softcore::maxsat {

/// A soft clause as presented to the drivers. Instance clauses carry their
/// literals; CP indicators carry `indicator` and `lits = {indicator}`.
struct SoftClause {
  std::vector<sat::Lit> lits;
  Weight weight = 1;
  sat::Lit indicator = sat::kNoLit;
  /// Assumption order key: higher first, ties by position.
  std::int64_t priority = 0;
};

/// Presents CP indicator literals as soft singleton clauses. Rejects duplicates
/// and nonpositive weights.
std::vector<SoftClause> wrap_indicators(std::span<const std::pair<sat::Lit, Weight>> indicators);

enum class Algorithm { kBnb, kWpm1, kMsu3 };
std::string to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);

enum class PbEncoding {
  kPropagator,  // PbUpperBound, tightened in place
  kCounter,     // sequential weighted counter clauses, re-encoded per bound
};

struct DriverOptions {
  /// Wall-clock limit for the whole run.
  std::optional<double> timeout_s;
  /// Deterministic work limit for the whole run (engine ticks).
  std::optional<std::uint64_t> tick_limit;
  PbEncoding pb_encoding = PbEncoding::kPropagator;
  /// Called with each incumbent objective (bnb, msu3) or the final one (wpm1).
  std::function<void(Weight)> on_incumbent;
};

enum class Status { kOptimal, kUnsatisfiable, kUnknown };
std::string to_string(Status s);

struct CoreRecord {
  std::vector<int> ids;  // soft ids, sorted and unique
  /// Found while an objective bound was active (msu3 after an incumbent):
  /// unsatisfiable together with that bound, not necessarily on its own.
  bool bounded = false;
  Weight bound = 0;  // strict objective bound in force, when bounded
};

struct Wpm1Round {
  std::vector<int> core;      // soft ids, sorted and unique
  std::size_t relaxed = 0;    // soft clause copies relaxed in this round
  Weight w_min = 0;
  Weight z_min = 0;           // after this round
};

struct DriverStats {
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t ticks = 0;
  std::uint64_t solves = 0;
  double wall_ms = 0.0;
};

struct OptimizeResult {
  Status status = Status::kUnknown;
  std::optional<Weight> z;               // best objective (optimal or incumbent)
  std::vector<sat::LBool> model;         // engine model of the best solution
  std::vector<Weight> incumbents;        // objective of every solution found, in order
  std::vector<CoreRecord> cores;         // every core returned by the engine
  std::vector<Wpm1Round> rounds;         // wpm1 only
  Weight lower_bound = 0;                // z_min for wpm1, else 0 or z when optimal
  DriverStats stats;

  bool value(sat::Lit l) const { return (model.at(l.var()) ^ l.negated()) == sat::LBool::kTrue; }
};

/// Drivers over an engine already loaded with the hard part. Soft ids in the
/// result are positions in `softs`. The engine is consumed: soft clauses,
/// violators and bounds are added to it.
OptimizeResult solve_bnb(sat::Engine& engine, std::span<const SoftClause> softs, const DriverOptions& opts = {});
OptimizeResult solve_wpm1(sat::Engine& engine, std::span<const SoftClause> softs, const DriverOptions& opts = {});
OptimizeResult solve_msu3(sat::Engine& engine, std::span<const SoftClause> softs, const DriverOptions& opts = {});
OptimizeResult solve(Algorithm algorithm, sat::Engine& engine, std::span<const SoftClause> softs,
                     const DriverOptions& opts = {});

/// Instance drivers. Soft ids in the result are clause indices of `inst`
/// (0-based, hard clauses included in the numbering). Optimal results are
/// audited against the original clauses.
OptimizeResult solve_bnb(const SoftInstance& inst, const DriverOptions& opts = {});
OptimizeResult solve_wpm1(const SoftInstance& inst, const DriverOptions& opts = {});
OptimizeResult solve_msu3(const SoftInstance& inst, const DriverOptions& opts = {});
OptimizeResult solve(Algorithm algorithm, const SoftInstance& inst, const DriverOptions& opts = {});

/// Assignment over instance variables 1..num_vars (index 0 unused).
std::vector<bool> assignment(const OptimizeResult& r, int num_vars);

/// MaxSAT evaluator style output: `o` lines per incumbent, `s` line, `v` line
/// (optimum only). `objectives = false` omits the `o` lines for callers that
/// stream them through `on_incumbent`.
std::string format_result(const OptimizeResult& r, int num_vars, bool objectives = true);

}  // namespace softcore::maxsat
