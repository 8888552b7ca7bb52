#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "softcore/maxsat/instance.hpp"

namespace softcore::rcpsp {
struct SoftPrecedenceProblem;
}

namespace softcore::oracle {

/// Thrown when an instance exceeds an enumeration guard.
class Refused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxVars = 22;
inline constexpr double kMaxScheduleGrid = 1e7;

struct MaxsatResult {
  std::optional<maxsat::Weight> optimum;  // nullopt: hard clauses unsatisfiable
  std::vector<bool> witness;              // indexed by variable, index 0 unused
};

/// Exact optimum by enumerating every assignment.
MaxsatResult brute_force_maxsat(const maxsat::SoftInstance& inst);

/// True iff the hard clauses together with the named clauses are unsatisfiable.
/// Ids are 0-based clause indices; out-of-range ids throw std::out_of_range.
bool verify_core(const maxsat::SoftInstance& inst, std::span<const int> core);

/// As verify_core, with the additional constraint that the soft clauses
/// violated weigh less than `strict_bound` in total.
bool verify_core_bounded(const maxsat::SoftInstance& inst, std::span<const int> core,
                         maxsat::Weight strict_bound);

struct ScheduleResult {
  std::optional<maxsat::Weight> optimum;  // nullopt: no resource-feasible schedule
  std::vector<int> starts;
};

/// Exact optimum of a soft-precedence problem by enumerating start times.
ScheduleResult brute_force_schedule(const rcpsp::SoftPrecedenceProblem& p);

}  // namespace softcore::oracle
