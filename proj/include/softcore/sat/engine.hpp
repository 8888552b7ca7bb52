#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "softcore/sat/literal.hpp"

namespace softcore::sat {

/// Provenance tag carried by every stored clause. Used by `retract_origin`.
enum class Origin : std::uint8_t { kUser, kExplanation, kRelaxation, kObjective };

/// Stable reference to a stored clause. Generation guards against slot reuse.
struct ClauseHandle {
  std::uint32_t index = UINT32_MAX;
  std::uint32_t generation = 0;
  bool valid() const { return index != UINT32_MAX; }
  friend bool operator==(const ClauseHandle&, const ClauseHandle&) = default;
};

struct AddResult {
  ClauseHandle handle;
  bool ok = true;  // false: clause falsified at root (engine is now inconsistent)
};

enum class SolveStatus : std::uint8_t { kSat, kUnsat, kUnknown };

struct SolveOutcome {
  SolveStatus status = SolveStatus::kUnknown;
  std::vector<LBool> model;  // indexed by variable; SAT only
  std::vector<Lit> core;     // subset of the assumptions; UNSAT only

  bool value(Lit l) const { return (model.at(l.var()) ^ l.negated()) == LBool::kTrue; }
};

struct EngineConfig {
  double var_decay = 0.95;
  double clause_decay = 0.999;
  bool restarts = true;
  std::uint64_t restart_base = 100;
  double restart_multiplier = 1.5;
  bool phase_saving = true;
  bool minimize_learnts = false;
  std::size_t learnt_floor = 4000;
  /// Verify every learnt clause and reason as it is created (std::logic_error on failure).
  bool self_check = false;
};

/// Resource limits for a single `solve` call. Absent members are unlimited.
struct Budget {
  std::optional<std::uint64_t> conflicts;
  std::optional<std::uint64_t> ticks;  // deterministic work units, see EngineStats::ticks
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct EngineStats {
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learnts_deleted = 0;
  std::uint64_t stale_retracts = 0;  // retract() calls naming unknown clauses
  /// Deterministic work measure: literal assignments + clause visits +
  /// propagator runs. Monotone, independent of wall time.
  std::uint64_t ticks = 0;
};

class Engine;

/// An external constraint hosted by the engine. `propagate` is called when
/// a watched variable is assigned; it must explain each inference with
/// `Engine::infer` and each failure with `Engine::fail`, and returns false
/// iff it reported a failure (or an inference hit a false literal).
class Propagator {
 public:
  virtual ~Propagator() = default;
  virtual bool propagate(Engine& engine) = 0;
};

using PropagatorId = std::uint32_t;

/// Conflict-driven clause-learning engine with assumption-based cores.
///
/// Single-threaded. Every public mutation other than `infer`/`fail` and
/// propagator-initiated `add_clause` calls happens at decision level 0;
/// `solve` always returns at level 0.
class Engine {
 public:
  explicit Engine(EngineConfig config = {});
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  Lit new_bool_var();
  /// Number of user variables (the constant-true variable is not counted).
  int num_vars() const { return static_cast<int>(assigns_.size()) - 1; }

  /// Adds a clause. Duplicate literals are merged, tautologies are accepted
  /// and ignored. Callable at root and, for propagators creating auxiliary
  /// literals, during search.
  AddResult add_clause(std::span<const Lit> lits, Origin origin = Origin::kUser);
  AddResult add_clause(std::initializer_list<Lit> lits, Origin origin = Origin::kUser) {
    return add_clause(std::span<const Lit>(lits.begin(), lits.size()), origin);
  }

  SolveOutcome solve(std::span<const Lit> assumptions = {});
  SolveOutcome solve(std::initializer_list<Lit> assumptions) {
    return solve(std::span<const Lit>(assumptions.begin(), assumptions.size()));
  }

  PropagatorId attach_propagator(std::unique_ptr<Propagator> p, std::span<const Var> watched = {});
  void watch(Var v, PropagatorId id);
  Propagator& propagator(PropagatorId id) { return *propagators_[id].impl; }
  /// Called when every variable known to the heap is assigned; returns the
  /// next decision literal or kNoLit if the assignment is complete.
  void set_brancher(std::function<Lit()> brancher) { brancher_ = std::move(brancher); }

  /// Removes the named clauses (unknown handles bump `stale_retracts`), then
  /// deletes all learnt clauses and recomputes the root assignment.
  void retract(std::span<const ClauseHandle> handles);
  void retract_origin(Origin origin);
  void delete_learnts();

  /// Re-runs propagation at the root; returns false if the root is inconsistent.
  bool propagate_root();
  bool ok() const { return ok_; }

  void set_budget(Budget budget) { budget_ = budget; }
  const EngineConfig& config() const { return config_; }
  EngineConfig& config() { return config_; }
  const EngineStats& stats() const { return stats_; }

  // --- state queries (valid during propagation and at root) ---------------
  LBool value(Lit l) const { return assigns_[l.var()] ^ l.negated(); }
  LBool value(Var v) const { return assigns_[v]; }
  bool is_true(Lit l) const { return value(l) == LBool::kTrue; }
  bool is_false(Lit l) const { return value(l) == LBool::kFalse; }
  int level(Var v) const { return levels_[v]; }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  bool fixed_at_root(Lit l) const { return value(l) != LBool::kUndef && levels_[l.var()] == 0; }

  // --- propagator interface ------------------------------------------------
  /// Assigns `lit` with explanation (antecedents -> lit). Every antecedent
  /// must be true; violating that is an integrity fault (std::logic_error).
  bool infer(Lit lit, std::span<const Lit> antecedents);
  /// Reports failure with nogood (antecedents -> false).
  bool fail(std::span<const Lit> antecedents);

  // --- inspection -------------------------------------------------------------
  std::vector<std::vector<Lit>> clauses(bool learnt) const;
  std::size_t num_learnts() const { return num_learnts_; }
  std::size_t num_clauses() const { return num_originals_; }
  /// Literals of a live clause, or nullopt when the handle is stale.
  std::optional<std::vector<Lit>> clause(ClauseHandle h) const;
  /// Reason clause of an assigned variable (implied literal first), or nullopt
  /// for decisions, unassigned variables and the constant.
  std::optional<std::vector<Lit>> reason(Var v) const;

 private:
  using CRef = std::int32_t;
  static constexpr CRef kNoRef = -1;

  struct ClauseRecord {
    std::vector<Lit> lits;
    double activity = 0.0;
    std::uint32_t generation = 0;
    Origin origin = Origin::kUser;
    bool learnt = false;
    bool live = false;
    bool watched = false;
    bool transient = false;  // propagator explanation, freed on backtrack
  };
  struct Watcher {
    CRef cref;
    Lit blocker;
  };
  struct PropagatorSlot {
    std::unique_ptr<Propagator> impl;
    bool queued = false;
  };
  class VarHeap;

  enum class SearchResult : std::uint8_t { kSat, kUnsat, kRestart, kBudget };

  CRef alloc(std::vector<Lit> lits, Origin origin, bool learnt, bool watched,
             bool transient = false);
  void release(CRef cref);
  void attach_watches(CRef cref);
  void detach_watches(CRef cref);
  void enqueue(Lit p, CRef reason);
  CRef propagate();
  void cancel_until(int level);
  void new_decision_level();
  void analyze(std::vector<Lit> conflict, std::vector<Lit>& learnt, int& backjump);
  bool redundant(Lit q) const;
  void analyze_final(Lit p, std::vector<Lit>& core);
  SearchResult search(std::uint64_t conflict_limit, std::span<const Lit> assumptions,
               std::vector<Lit>& core);
  Lit pick_branch();
  void bump_var(Var v);
  void bump_clause(ClauseRecord& c);
  void reduce_learnts();
  void rebuild_root();
  bool out_of_budget() const;
  void wake(Var v);

  EngineConfig config_;
  EngineStats stats_;
  Budget budget_;

  std::vector<LBool> assigns_;
  std::vector<int> levels_;
  std::vector<CRef> reasons_;
  std::vector<bool> saved_phase_;
  std::vector<double> activity_;
  std::vector<char> seen_;
  std::vector<std::vector<Watcher>> watches_;  // by literal code: clauses watching that literal
  std::vector<std::vector<PropagatorId>> var_props_;

  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<ClauseRecord> db_;
  std::vector<CRef> free_slots_;
  std::vector<std::vector<CRef>> level_explanations_;
  std::size_t num_learnts_ = 0;
  std::size_t num_originals_ = 0;

  std::vector<PropagatorSlot> propagators_;
  std::vector<PropagatorId> prop_queue_;
  std::size_t prop_qhead_ = 0;
  std::function<Lit()> brancher_;

  std::unique_ptr<VarHeap> heap_;
  double var_inc_ = 1.0;
  double cla_inc_ = 1.0;
  CRef pending_conflict_ = kNoRef;
  bool restart_pending_ = false;  // a unit clause arrived mid-search
  bool in_propagation_ = false;
  bool ok_ = true;
};

}  // namespace softcore::sat
