#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "softcore/cp/model.hpp"
#include "softcore/maxsat/drivers.hpp"

namespace softcore::rcpsp {

using maxsat::Weight;

/// Generalized precedence s_to - s_from >= lag (tasks 0-based).
struct Precedence {
  int from;
  int to;
  int lag;
  friend bool operator==(const Precedence&, const Precedence&) = default;
};

struct RcpspMax {
  std::vector<int> durations;
  std::vector<std::vector<int>> demands;  // [task][resource]
  std::vector<int> capacities;
  std::vector<Precedence> precedences;

  std::size_t num_tasks() const { return durations.size(); }
  std::size_t num_resources() const { return capacities.size(); }
  int max_duration() const;
  friend bool operator==(const RcpspMax&, const RcpspMax&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Format: `<n> <r>`, n lines `<duration> <demand_1..r>`, one line of r
/// capacities, then `<from> <to> <lag>` lines with 1-based task numbers.
/// Lines starting with `#` are comments.
RcpspMax parse_instance(std::string_view text);
RcpspMax read_instance(const std::string& path);
std::string serialize_instance(const RcpspMax& inst);

/// Exact nonnegative rational.
struct Fraction {
  std::int64_t num = 1;
  std::int64_t den = 1;

  /// Accepts "0.7", "7/10" or "1".
  static Fraction parse(std::string_view text);
  std::int64_t floor_times(std::int64_t l) const;
  std::string to_string() const;  // decimal when exact within 6 digits, else num/den
  friend bool operator==(const Fraction& a, const Fraction& b) { return a.num * b.den == b.num * a.den; }
  friend bool operator<(const Fraction& a, const Fraction& b) { return a.num * b.den < b.num * a.den; }
};

enum class Mode { kCardinality, kWeighted };
std::string to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view name);

struct SoftPrecedenceProblem {
  RcpspMax base;
  Fraction alpha;
  int lower_bound = 0;
  int horizon = 0;
  Mode mode = Mode::kCardinality;
  std::vector<Weight> weights;  // per precedence
};

/// Valid lower bound on the minimum makespan: the larger of the longest-path
/// bound over all precedences and the per-resource energy bound.
/// Throws std::invalid_argument on a positive-length precedence cycle.
int makespan_lower_bound(const RcpspMax& inst);

struct MakespanBound {
  int value = 0;
  bool exact = false;  // false: the budget ran out and value is the best proven lower bound
};
/// Destructive lower-bound search with every precedence hard: tries horizons
/// upward from the lower bound. nullopt when no horizon up to the trivial cap
/// (sum of durations and positive lags) is feasible.
std::optional<MakespanBound> makespan_search(const RcpspMax& inst, const maxsat::DriverOptions& opts = {});
/// The minimum makespan, or nullopt when infeasible or the budget runs out.
std::optional<int> exact_makespan(const RcpspMax& inst, const maxsat::DriverOptions& opts = {});
/// splitmix64 finalizer applied to `seed + (k + 1) * 0x9E3779B97F4A7C15`.
std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t k);
/// Weight of precedence k in weighted mode: 1 + splitmix64(seed, k) % 10.
Weight precedence_weight(std::uint64_t seed, std::size_t k);

/// horizon = floor(alpha * l); all precedences soft. Throws std::invalid_argument
/// when alpha is outside (0, 1], l < 1, or the horizon is below the longest task.
SoftPrecedenceProblem soften(const RcpspMax& inst, Fraction alpha, int l, Mode mode, std::uint64_t seed);

struct BuiltModel {
  std::vector<cp::IntVar> starts;
  std::vector<std::pair<sat::Lit, Weight>> indicators;  // one per precedence
  bool root_feasible = true;
};

/// Hard part: start domains [0, horizon - duration] and one cumulative per
/// resource. Soft part: i_j -> s_to - s_from >= lag for every precedence.
BuiltModel build_model(const SoftPrecedenceProblem& p, cp::Model& model);

/// Cost of a schedule (sum of weights of violated precedences), or nullopt if it
/// breaks a start domain or a resource capacity.
std::optional<Weight> schedule_cost(const SoftPrecedenceProblem& p, const std::vector<int>& starts);

struct ScheduleResult {
  maxsat::OptimizeResult result;
  std::vector<int> starts;           // best schedule, when one was found
  std::vector<bool> enforced;        // indicator values of the best schedule
};

/// Builds the model on a fresh engine, runs the driver and audits the result:
/// start domains, resource profile, enforced precedences, and that the
/// reported cost equals the weight of false indicators. Audit failures throw
/// std::logic_error.
ScheduleResult solve_schedule(const SoftPrecedenceProblem& p, maxsat::Algorithm algorithm,
                              const maxsat::DriverOptions& opts = {});

struct GeneratorConfig {
  int tasks = 6;
  int resources = 1;
  int max_duration = 4;
  int max_capacity = 3;
  /// Probability (percent) of a precedence between an ordered task pair.
  int edge_percent = 30;
  /// Probability (percent) that a precedence also gets a maximum time lag.
  int max_lag_percent = 20;
};

/// Seeded random RCPSP/max instance without positive cycles.
RcpspMax generate_instance(std::uint64_t seed, const GeneratorConfig& cfg = {});

}  // namespace softcore::rcpsp
