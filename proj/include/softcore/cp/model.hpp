#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "softcore/sat/engine.hpp"

namespace softcore::cp {

/// Handle to an integer variable owned by a `Model`.
struct IntVar {
  int id = -1;
  friend bool operator==(IntVar, IntVar) = default;
};

struct LinearTerm {
  std::int64_t coef;
  IntVar var;
};

struct Task {
  IntVar start;
  int duration;
  int demand;
};

struct PbTerm {
  std::int64_t weight;
  sat::Lit lit;
};

/// Enforces sum of weights of true literals < bound, explaining every
/// inference by the true literals forming the current sum.
class PbUpperBound final : public sat::Propagator {
 public:
  PbUpperBound(std::vector<PbTerm> terms, std::int64_t strict_bound)
      : terms_(std::move(terms)), bound_(strict_bound) {}

  bool propagate(sat::Engine& engine) override;

  /// Replaces the bound. Only tightening keeps learnt clauses valid; call at
  /// root and re-propagate (the next `solve` does so).
  void set_bound(std::int64_t strict_bound) { bound_ = strict_bound; }
  std::int64_t bound() const { return bound_; }
  std::span<const PbTerm> terms() const { return terms_; }

 private:
  std::vector<PbTerm> terms_;
  std::int64_t bound_;
};

/// Lazy-clause-generation layer over a `sat::Engine`: integer variables whose
/// bound facts [x >= v] are engine literals created on demand, plus
/// explaining propagators.
///
/// The model registers itself as the engine's brancher (fixing unfixed
/// integer variables to their lower bound once all Booleans are decided), so
/// it must outlive every `solve` on that engine and cannot be moved.
class Model {
 public:
  explicit Model(sat::Engine& engine);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  sat::Engine& engine() { return engine_; }
  const sat::Engine& engine() const { return engine_; }

  IntVar new_int_var(int lb, int ub);
  std::size_t num_int_vars() const { return vars_.size(); }
  int initial_lb(IntVar x) const { return vars_.at(x.id).lb; }
  int initial_ub(IntVar x) const { return vars_.at(x.id).ub; }

  /// [x >= v]; kTrue when v <= initial lb, kFalse when v > initial ub.
  sat::Lit lit_geq(IntVar x, int v);
  sat::Lit lit_leq(IntVar x, int v) { return ~lit_geq(x, v + 1); }
  /// [x = v]; kFalse outside the initial domain.
  sat::Lit lit_eq(IntVar x, int v);
  /// Number of materialized bound literals of x.
  std::size_t num_bound_lits(IntVar x) const { return vars_.at(x.id).geq.size(); }

  // Current bounds as implied by assigned bound literals.
  int lb(IntVar x) const;
  int ub(IntVar x) const;
  /// True literal establishing lb(x) (kTrue at the initial bound).
  sat::Lit lb_lit(IntVar x) const;
  /// True literal establishing ub(x), i.e. [x <= ub] (kTrue at the initial bound).
  sat::Lit ub_lit(IntVar x) const;

  /// Integer value of x in a SAT model (indexed by variable). Bound literals
  /// created after the model was taken are ignored.
  int value(IntVar x, std::span<const sat::LBool> model) const;
  int value(IntVar x, const sat::SolveOutcome& outcome) const { return value(x, outcome.model); }

  /// i -> sum(coef * x) >= rhs. Dropped when i is false at the root.
  void post_half_reified_linear(sat::Lit indicator, std::vector<LinearTerm> terms, std::int64_t rhs);
  void post_linear(std::vector<LinearTerm> terms, std::int64_t rhs) {
    post_half_reified_linear(sat::kTrue, std::move(terms), rhs);
  }
  /// Pairwise decomposition; returns the posted clause handles.
  std::vector<sat::ClauseHandle> post_at_most_one(std::span<const sat::Lit> lits,
                                                  sat::Origin origin = sat::Origin::kRelaxation);
  PbUpperBound& post_pb_upper_bound(std::vector<PbTerm> terms, std::int64_t strict_bound);
  /// Timetable cumulative. Returns false if the constraint fails at the root.
  bool post_cumulative(std::vector<Task> tasks, int capacity);

  /// Subscribes a propagator to every (present and future) bound literal of x.
  void subscribe(IntVar x, sat::PropagatorId id);

 private:
  struct VarData {
    int lb;
    int ub;
    std::map<int, sat::Lit> geq;
    std::map<int, sat::Lit> eq;
    std::vector<sat::PropagatorId> subscribers;
  };

  sat::Lit branch();

  sat::Engine& engine_;
  std::vector<VarData> vars_;
};

/// Sequential weighted counter encoding of sum(w * lit) < strict_bound as
/// clauses. Used for differential testing against `PbUpperBound`.
std::vector<sat::ClauseHandle> encode_pb_upper_bound(sat::Engine& engine, std::span<const PbTerm> terms,
                                                     std::int64_t strict_bound,
                                                     sat::Origin origin = sat::Origin::kObjective);

}  // namespace softcore::cp
