#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "softcore/rcpsp/rcpsp.hpp"

namespace softcore::rcpsp {

struct BenchInstance {
  std::string set;
  std::string name;
  RcpspMax instance;
};

enum class BoundSource {
  kExact,       // makespan_search: minimum makespan, or the best proven bound on timeout
  kLowerBound,  // makespan_lower_bound
};

struct BenchConfig {
  std::vector<Fraction> alphas{Fraction{7, 10}, Fraction{4, 5}, Fraction{9, 10}};
  std::vector<Mode> modes{Mode::kCardinality, Mode::kWeighted};
  std::vector<maxsat::Algorithm> algorithms{maxsat::Algorithm::kBnb, maxsat::Algorithm::kWpm1,
                                            maxsat::Algorithm::kMsu3};
  double timeout_s = 600.0;
  std::uint64_t seed = 1;
  int jobs = 1;
  /// Measure time in engine ticks (10000 ticks = 1 ms) instead of wall time,
  /// making every output byte reproducible.
  bool deterministic_time = false;
  BoundSource bound = BoundSource::kExact;
};

inline constexpr double kTicksPerMs = 10000.0;

struct BenchRow {
  std::string set;
  Fraction alpha;
  Mode mode = Mode::kCardinality;
  maxsat::Algorithm algorithm = maxsat::Algorithm::kBnb;
  std::string instance;
  std::string status;  // optimal | timeout | infeasible
  std::optional<Weight> z_opt;
  double wall_ms = 0.0;
  std::uint64_t conflicts = 0;
  std::size_t cores = 0;
  std::size_t incumbents = 0;
};

/// Runs every instance x alpha x mode x algorithm cell. Rows are sorted by
/// (set, alpha, mode, algorithm, instance) regardless of `jobs`.
std::vector<BenchRow> run_benchmark(const std::vector<BenchInstance>& instances, const BenchConfig& cfg);

std::string to_csv(const std::vector<BenchRow>& rows);

struct CellSummary {
  std::size_t instances = 0;  // feasible instances in the cell
  double geo_mean_s = 0.0;    // timeouts counted at the budget
  std::size_t timeouts = 0;
};

/// Geometric mean and timeout count for one (set, alpha, mode, algorithm)
/// cell. Instances flagged infeasible by any algorithm are left out.
CellSummary summarize(const std::vector<BenchRow>& rows, const std::string& set, const Fraction& alpha, Mode mode,
                      maxsat::Algorithm algorithm, double timeout_s);

/// Aligned text table: one block per mode and alpha, one row per set with the
/// instance count and, per algorithm, geometric mean seconds and timeouts.
std::string format_table(const std::vector<BenchRow>& rows, const BenchConfig& cfg);

/// Loads `*.rcp` files. Files directly in `dir` form a set named after `dir`;
/// each subdirectory forms a set named after the subdirectory.
std::vector<BenchInstance> load_instances(const std::string& dir);

}  // namespace softcore::rcpsp
