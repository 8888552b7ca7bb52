#include "softcore/sat/engine.hpp"

#include <algorithm>
#include <cassert>
#include <climits>
#include <cmath>
#include <stdexcept>
#include <string>

namespace softcore::sat {

// Max-heap on activity; equal activities favour the lower variable index.
class Engine::VarHeap {
 public:
  explicit VarHeap(const std::vector<double>& activity) : act_(activity) {}

  bool contains(Var v) const { return v < static_cast<Var>(pos_.size()) && pos_[v] >= 0; }
  bool empty() const { return heap_.empty(); }

  void insert(Var v) {
    if (v >= static_cast<Var>(pos_.size())) pos_.resize(v + 1, -1);
    if (pos_[v] >= 0) return;
    pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    up(pos_[v]);
  }

  void increased(Var v) {
    if (contains(v)) up(pos_[v]);
  }

  Var pop() {
    Var top = heap_.front();
    heap_.front() = heap_.back();
    pos_[heap_.front()] = 0;
    pos_[top] = -1;
    heap_.pop_back();
    if (!heap_.empty()) down(0);
    return top;
  }

 private:
  bool before(Var a, Var b) const {
    return act_[a] > act_[b] || (act_[a] == act_[b] && a < b);
  }
  void up(int i) {
    Var v = heap_[i];
    while (i > 0) {
      int parent = (i - 1) / 2;
      if (!before(v, heap_[parent])) break;
      heap_[i] = heap_[parent];
      pos_[heap_[i]] = i;
      i = parent;
    }
    heap_[i] = v;
    pos_[v] = i;
  }
  void down(int i) {
    Var v = heap_[i];
    const int n = static_cast<int>(heap_.size());
    for (;;) {
      int child = 2 * i + 1;
      if (child >= n) break;
      if (child + 1 < n && before(heap_[child + 1], heap_[child])) ++child;
      if (!before(heap_[child], v)) break;
      heap_[i] = heap_[child];
      pos_[heap_[i]] = i;
      i = child;
    }
    heap_[i] = v;
    pos_[v] = i;
  }

  const std::vector<double>& act_;
  std::vector<Var> heap_;
  std::vector<int> pos_;
};

Engine::Engine(EngineConfig config)
    : config_(config), heap_(std::make_unique<VarHeap>(activity_)) {
  // Variable 0 is the constant true.
  assigns_.push_back(LBool::kTrue);
  levels_.push_back(0);
  reasons_.push_back(kNoRef);
  saved_phase_.push_back(true);
  activity_.push_back(0.0);
  seen_.push_back(0);
  watches_.resize(2);
  var_props_.emplace_back();
  trail_.push_back(kTrue);
  level_explanations_.resize(1);
}

Engine::~Engine() = default;

Lit Engine::new_bool_var() {
  const Var v = static_cast<Var>(assigns_.size());
  assigns_.push_back(LBool::kUndef);
  levels_.push_back(0);
  reasons_.push_back(kNoRef);
  saved_phase_.push_back(false);
  activity_.push_back(0.0);
  seen_.push_back(0);
  watches_.resize(2 * (v + 1));
  var_props_.emplace_back();
  heap_->insert(v);
  return Lit(v, false);
}

// --- clause storage -----------------------------------------------------------

Engine::CRef Engine::alloc(std::vector<Lit> lits, Origin origin, bool learnt, bool watched,
                          bool transient) {
  CRef cref;
  if (!free_slots_.empty()) {
    cref = free_slots_.back();
    free_slots_.pop_back();
  } else {
    cref = static_cast<CRef>(db_.size());
    db_.emplace_back();
  }
  ClauseRecord& c = db_[cref];
  c.lits = std::move(lits);
  c.activity = 0.0;
  c.origin = origin;
  c.learnt = learnt;
  c.live = true;
  c.watched = watched && c.lits.size() >= 2;
  c.transient = transient;
  if (c.watched) attach_watches(cref);
  if (learnt) {
    ++num_learnts_;
  } else if (!transient) {
    ++num_originals_;
  }
  return cref;
}

void Engine::release(CRef cref) {
  ClauseRecord& c = db_[cref];
  assert(c.live);
  if (c.watched) detach_watches(cref);
  if (c.learnt) {
    --num_learnts_;
  } else if (!c.transient) {
    --num_originals_;
  }
  c.lits.clear();
  c.lits.shrink_to_fit();
  c.live = false;
  c.watched = false;
  c.transient = false;
  ++c.generation;
  free_slots_.push_back(cref);
}

void Engine::attach_watches(CRef cref) {
  const auto& lits = db_[cref].lits;
  watches_[lits[0].code()].push_back({cref, lits[1]});
  watches_[lits[1].code()].push_back({cref, lits[0]});
}

void Engine::detach_watches(CRef cref) {
  const auto& lits = db_[cref].lits;
  for (int k = 0; k < 2; ++k) {
    auto& ws = watches_[lits[k].code()];
    auto it = std::find_if(ws.begin(), ws.end(), [cref](const Watcher& w) { return w.cref == cref; });
    assert(it != ws.end());
    ws.erase(it);
  }
}

AddResult Engine::add_clause(std::span<const Lit> input, Origin origin) {
  std::vector<Lit> lits;
  lits.reserve(input.size());
  for (Lit l : input) {
    if (!l.valid() || l.var() > num_vars()) {
      throw std::invalid_argument("clause literal refers to unknown variable " +
                                  std::to_string(l.to_dimacs()));
    }
    if (l == kFalse) continue;
    if (l == kTrue) return {ClauseHandle{}, ok_};
    lits.push_back(l);
  }
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  for (std::size_t i = 1; i < lits.size(); ++i) {
    if (lits[i] == ~lits[i - 1]) return {ClauseHandle{}, ok_};
  }

  const bool at_root = decision_level() == 0;
  CRef cref;
  if (lits.size() <= 1) {
    cref = alloc(std::move(lits), origin, false, false);
    const auto& c = db_[cref].lits;
    if (c.empty()) {
      if (at_root) {
        ok_ = false;
      } else {
        pending_conflict_ = cref;
      }
    } else if (at_root) {
      if (is_false(c[0])) {
        ok_ = false;
      } else if (value(c[0]) == LBool::kUndef) {
        enqueue(c[0], cref);
      }
    } else {
      restart_pending_ = true;
      if (is_false(c[0])) {
        pending_conflict_ = cref;
      } else if (value(c[0]) == LBool::kUndef) {
        enqueue(c[0], cref);
      }
    }
  } else {
    // Best watches first: true, then unassigned, then false by decreasing level.
    auto rank = [this](Lit l) {
      switch (value(l)) {
        case LBool::kTrue: return INT_MAX;
        case LBool::kUndef: return INT_MAX - 1;
        default: return levels_[l.var()];
      }
    };
    std::stable_sort(lits.begin(), lits.end(), [&](Lit a, Lit b) { return rank(a) > rank(b); });
    cref = alloc(std::move(lits), origin, false, true);
    const auto& c = db_[cref].lits;
    if (is_false(c[0])) {
      if (at_root) {
        ok_ = false;
      } else {
        pending_conflict_ = cref;
      }
    } else if (value(c[0]) == LBool::kUndef && is_false(c[1])) {
      enqueue(c[0], cref);
    }
  }

  if (at_root && ok_ && !in_propagation_ && propagate() != kNoRef) ok_ = false;
  return {ClauseHandle{static_cast<std::uint32_t>(cref), db_[cref].generation}, ok_};
}

std::optional<std::vector<Lit>> Engine::clause(ClauseHandle h) const {
  if (!h.valid() || h.index >= db_.size()) return std::nullopt;
  const auto& c = db_[h.index];
  if (!c.live || c.generation != h.generation || c.transient) return std::nullopt;
  return c.lits;
}

std::optional<std::vector<Lit>> Engine::reason(Var v) const {
  if (v <= 0 || v > num_vars() || assigns_[v] == LBool::kUndef || reasons_[v] == kNoRef) return std::nullopt;
  return db_[reasons_[v]].lits;
}

std::vector<std::vector<Lit>> Engine::clauses(bool learnt) const {
  std::vector<std::vector<Lit>> out;
  for (const auto& c : db_) {
    if (c.live && !c.transient && c.learnt == learnt) out.push_back(c.lits);
  }
  return out;
}

// --- assignment ------------------------------------------------------------------

void Engine::wake(Var v) {
  for (PropagatorId id : var_props_[v]) {
    auto& slot = propagators_[id];
    if (!slot.queued) {
      slot.queued = true;
      prop_queue_.push_back(id);
    }
  }
}

void Engine::enqueue(Lit p, CRef reason) {
  assert(value(p) == LBool::kUndef);
  if (config_.self_check && reason != kNoRef) {
    const auto& lits = db_[reason].lits;
    if (lits.empty() || lits[0] != p) throw std::logic_error("self-check: reason does not start with its literal");
    for (std::size_t k = 1; k < lits.size(); ++k) {
      if (!is_false(lits[k])) throw std::logic_error("self-check: reason literal not false");
    }
  }
  const Var v = p.var();
  assigns_[v] = p.negated() ? LBool::kFalse : LBool::kTrue;
  levels_[v] = decision_level();
  reasons_[v] = reason;
  trail_.push_back(p);
  ++stats_.propagations;
  ++stats_.ticks;
  wake(v);
}

void Engine::new_decision_level() {
  trail_lim_.push_back(static_cast<int>(trail_.size()));
  if (level_explanations_.size() <= trail_lim_.size()) level_explanations_.resize(trail_lim_.size() + 1);
}

void Engine::cancel_until(int level) {
  if (decision_level() <= level) return;
  for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[level]; --i) {
    const Var v = trail_[i].var();
    assigns_[v] = LBool::kUndef;
    reasons_[v] = kNoRef;
    if (config_.phase_saving) saved_phase_[v] = !trail_[i].negated();
    heap_->insert(v);
  }
  trail_.resize(trail_lim_[level]);
  qhead_ = trail_.size();
  trail_lim_.resize(level);
  for (std::size_t l = level + 1; l < level_explanations_.size(); ++l) {
    for (CRef cref : level_explanations_[l]) release(cref);
    level_explanations_[l].clear();
  }
}

Engine::CRef Engine::propagate() {
  for (;;) {
    if (pending_conflict_ != kNoRef) {
      const CRef c = pending_conflict_;
      pending_conflict_ = kNoRef;
      qhead_ = trail_.size();
      return c;
    }
    while (qhead_ < trail_.size()) {
      const Lit p = trail_[qhead_++];
      const Lit false_lit = ~p;
      auto& ws = watches_[false_lit.code()];
      std::size_t i = 0;
      std::size_t j = 0;
      while (i < ws.size()) {
        ++stats_.ticks;
        const Watcher w = ws[i];
        if (is_true(w.blocker)) {
          ws[j++] = ws[i++];
          continue;
        }
        auto& c = db_[w.cref].lits;
        if (c[0] == false_lit) std::swap(c[0], c[1]);
        ++i;
        const Lit first = c[0];
        const Watcher moved{w.cref, first};
        if (first != w.blocker && is_true(first)) {
          ws[j++] = moved;
          continue;
        }
        bool relocated = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (!is_false(c[k])) {
            std::swap(c[1], c[k]);
            watches_[c[1].code()].push_back(moved);
            relocated = true;
            break;
          }
        }
        if (relocated) continue;
        ws[j++] = moved;
        if (is_false(first)) {
          while (i < ws.size()) ws[j++] = ws[i++];
          ws.resize(j);
          qhead_ = trail_.size();
          return w.cref;
        }
        enqueue(first, w.cref);
      }
      ws.resize(j);
    }
    if (prop_qhead_ < prop_queue_.size()) {
      const PropagatorId id = prop_queue_[prop_qhead_++];
      if (prop_qhead_ == prop_queue_.size()) {
        prop_queue_.clear();
        prop_qhead_ = 0;
      }
      propagators_[id].queued = false;
      stats_.ticks += 4;
      in_propagation_ = true;
      bool consistent = false;
      try {
        consistent = propagators_[id].impl->propagate(*this);
      } catch (...) {
        in_propagation_ = false;
        throw;
      }
      in_propagation_ = false;
      if (!consistent && pending_conflict_ == kNoRef) {
        throw std::logic_error("propagator reported failure without a nogood");
      }
      continue;
    }
    return kNoRef;
  }
}

// --- propagator interface -------------------------------------------------------

namespace {
void check_antecedents(const Engine& e, std::span<const Lit> antecedents) {
  for (Lit a : antecedents) {
    if (!a.valid() || a.var() > e.num_vars() || !e.is_true(a)) {
      throw std::logic_error("propagator explanation cites literal " + std::to_string(a.to_dimacs()) +
                             " which is not true");
    }
  }
}
}  // namespace

bool Engine::infer(Lit lit, std::span<const Lit> antecedents) {
  check_antecedents(*this, antecedents);
  if (is_true(lit)) return true;
  std::vector<Lit> lits;
  lits.reserve(antecedents.size() + 1);
  lits.push_back(lit);
  for (Lit a : antecedents) {
    if (a.var() != 0) lits.push_back(~a);
  }
  const CRef cref = alloc(std::move(lits), Origin::kExplanation, false, false, true);
  level_explanations_[decision_level()].push_back(cref);
  if (is_false(lit)) {
    pending_conflict_ = cref;
    return false;
  }
  enqueue(lit, cref);
  return true;
}

bool Engine::fail(std::span<const Lit> antecedents) {
  check_antecedents(*this, antecedents);
  std::vector<Lit> lits;
  for (Lit a : antecedents) {
    if (a.var() != 0) lits.push_back(~a);
  }
  const CRef cref = alloc(std::move(lits), Origin::kExplanation, false, false, true);
  level_explanations_[decision_level()].push_back(cref);
  pending_conflict_ = cref;
  return false;
}

PropagatorId Engine::attach_propagator(std::unique_ptr<Propagator> p, std::span<const Var> watched) {
  const auto id = static_cast<PropagatorId>(propagators_.size());
  propagators_.push_back({std::move(p), true});
  prop_queue_.push_back(id);
  for (Var v : watched) watch(v, id);
  if (decision_level() == 0 && ok_ && !in_propagation_ && propagate() != kNoRef) ok_ = false;
  return id;
}

void Engine::watch(Var v, PropagatorId id) {
  auto& list = var_props_.at(v);
  if (std::find(list.begin(), list.end(), id) == list.end()) list.push_back(id);
}

// --- conflict analysis ------------------------------------------------------------

void Engine::bump_var(Var v) {
  if ((activity_[v] += var_inc_) > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  heap_->increased(v);
}

void Engine::bump_clause(ClauseRecord& c) {
  if ((c.activity += cla_inc_) > 1e20) {
    for (auto& r : db_) {
      if (r.learnt) r.activity *= 1e-20;
    }
    cla_inc_ *= 1e-20;
  }
}

bool Engine::redundant(Lit q) const {
  const CRef r = reasons_[q.var()];
  if (r == kNoRef) return false;
  const auto& lits = db_[r].lits;
  for (std::size_t k = 1; k < lits.size(); ++k) {
    const Var v = lits[k].var();
    if (!seen_[v] && levels_[v] > 0) return false;
  }
  return true;
}

void Engine::analyze(std::vector<Lit> conflict, std::vector<Lit>& learnt, int& backjump) {
  learnt.clear();
  learnt.push_back(kNoLit);
  std::vector<Var> touched;
  int open = 0;
  Lit p = kNoLit;
  int index = static_cast<int>(trail_.size()) - 1;
  const std::vector<Lit>* lits = &conflict;
  std::size_t skip = 0;

  for (;;) {
    for (std::size_t k = skip; k < lits->size(); ++k) {
      const Lit q = (*lits)[k];
      const Var v = q.var();
      if (seen_[v] || levels_[v] == 0) continue;
      bump_var(v);
      seen_[v] = 1;
      touched.push_back(v);
      if (levels_[v] >= decision_level()) {
        ++open;
      } else {
        learnt.push_back(q);
      }
    }
    while (!seen_[trail_[index].var()]) --index;
    p = trail_[index--];
    seen_[p.var()] = 0;
    if (--open <= 0) break;
    const CRef r = reasons_[p.var()];
    assert(r != kNoRef);
    auto& reason = db_[r];
    assert(reason.lits[0] == p);
    if (reason.learnt) bump_clause(reason);
    lits = &reason.lits;
    skip = 1;
  }
  learnt[0] = ~p;

  if (config_.minimize_learnts) {
    std::size_t keep = 1;
    for (std::size_t k = 1; k < learnt.size(); ++k) {
      if (!redundant(learnt[k])) learnt[keep++] = learnt[k];
    }
    learnt.resize(keep);
  }
  for (Var v : touched) seen_[v] = 0;

  backjump = 0;
  if (learnt.size() > 1) {
    std::size_t best = 1;
    for (std::size_t k = 2; k < learnt.size(); ++k) {
      if (levels_[learnt[k].var()] > levels_[learnt[best].var()]) best = k;
    }
    std::swap(learnt[1], learnt[best]);
    backjump = levels_[learnt[1].var()];
  }
}

void Engine::analyze_final(Lit p, std::vector<Lit>& core) {
  // p is an assumption that is currently false.
  core.clear();
  core.push_back(p);
  if (decision_level() == 0) return;
  seen_[p.var()] = 1;
  for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[0]; --i) {
    const Var x = trail_[i].var();
    if (!seen_[x]) continue;
    const CRef r = reasons_[x];
    if (r == kNoRef) {
      assert(levels_[x] > 0);
      core.push_back(trail_[i]);
    } else {
      const auto& lits = db_[r].lits;
      for (std::size_t k = 0; k < lits.size(); ++k) {
        if (lits[k].var() != x && levels_[lits[k].var()] > 0) seen_[lits[k].var()] = 1;
      }
    }
    seen_[x] = 0;
  }
  seen_[p.var()] = 0;
}

// --- learnt clause database ----------------------------------------------------

void Engine::reduce_learnts() {
  std::vector<CRef> candidates;
  for (CRef r = 0; r < static_cast<CRef>(db_.size()); ++r) {
    const auto& c = db_[r];
    if (!c.live || !c.learnt || c.lits.size() <= 2) continue;
    const Var v0 = c.lits[0].var();
    if (reasons_[v0] == r && value(v0) != LBool::kUndef) continue;  // locked
    candidates.push_back(r);
  }
  std::sort(candidates.begin(), candidates.end(), [this](CRef a, CRef b) {
    return db_[a].activity < db_[b].activity || (db_[a].activity == db_[b].activity && a < b);
  });
  const std::size_t n = candidates.size() / 2;
  for (std::size_t k = 0; k < n; ++k) release(candidates[k]);
  stats_.learnts_deleted += n;
}

void Engine::rebuild_root() {
  cancel_until(0);
  for (std::size_t i = 1; i < trail_.size(); ++i) {
    const Var v = trail_[i].var();
    assigns_[v] = LBool::kUndef;
    reasons_[v] = kNoRef;
    heap_->insert(v);
  }
  trail_.resize(1);
  qhead_ = 0;
  for (CRef cref : level_explanations_[0]) release(cref);
  level_explanations_[0].clear();
  pending_conflict_ = kNoRef;
  restart_pending_ = false;
  ok_ = true;
  for (CRef r = 0; r < static_cast<CRef>(db_.size()); ++r) {
    const auto& c = db_[r];
    if (!c.live || c.learnt || c.transient || c.lits.size() > 1) continue;
    if (c.lits.empty() || is_false(c.lits[0])) {
      ok_ = false;
    } else if (value(c.lits[0]) == LBool::kUndef) {
      enqueue(c.lits[0], r);
    }
  }
  for (PropagatorId id = 0; id < propagators_.size(); ++id) {
    if (!propagators_[id].queued) {
      propagators_[id].queued = true;
      prop_queue_.push_back(id);
    }
  }
  if (ok_ && propagate() != kNoRef) ok_ = false;
}

void Engine::delete_learnts() {
  assert(decision_level() == 0);
  for (CRef r = 0; r < static_cast<CRef>(db_.size()); ++r) {
    if (db_[r].live && db_[r].learnt) {
      release(r);
      ++stats_.learnts_deleted;
    }
  }
  rebuild_root();
}

void Engine::retract(std::span<const ClauseHandle> handles) {
  assert(decision_level() == 0);
  for (const ClauseHandle& h : handles) {
    if (!h.valid() || h.index >= db_.size()) {
      ++stats_.stale_retracts;
      continue;
    }
    auto& c = db_[h.index];
    if (!c.live || c.generation != h.generation || c.learnt || c.transient) {
      ++stats_.stale_retracts;
      continue;
    }
    // The clause may be the reason of a root assignment; rebuild_root clears those.
    release(static_cast<CRef>(h.index));
  }
  delete_learnts();
}

void Engine::retract_origin(Origin origin) {
  assert(decision_level() == 0);
  for (CRef r = 0; r < static_cast<CRef>(db_.size()); ++r) {
    const auto& c = db_[r];
    if (c.live && !c.learnt && !c.transient && c.origin == origin) release(r);
  }
  delete_learnts();
}

bool Engine::propagate_root() {
  assert(decision_level() == 0);
  if (!ok_) return false;
  for (PropagatorId id = 0; id < propagators_.size(); ++id) {
    if (!propagators_[id].queued) {
      propagators_[id].queued = true;
      prop_queue_.push_back(id);
    }
  }
  if (propagate() != kNoRef) ok_ = false;
  return ok_;
}

// --- search ---------------------------------------------------------------------------

bool Engine::out_of_budget() const {
  if (budget_.conflicts && stats_.conflicts >= *budget_.conflicts) return true;
  if (budget_.ticks && stats_.ticks >= *budget_.ticks) return true;
  if (budget_.deadline && std::chrono::steady_clock::now() >= *budget_.deadline) return true;
  return false;
}

Lit Engine::pick_branch() {
  while (!heap_->empty()) {
    const Var v = heap_->pop();
    if (v != 0 && value(v) == LBool::kUndef) return Lit(v, !saved_phase_[v]);
  }
  return kNoLit;
}

Engine::SearchResult Engine::search(std::uint64_t conflict_limit, std::span<const Lit> assumptions,
                                    std::vector<Lit>& core) {
  std::uint64_t local_conflicts = 0;
  std::vector<Lit> learnt;
  for (;;) {
    const CRef confl = propagate();
    if (confl != kNoRef) {
      ++stats_.conflicts;
      ++local_conflicts;
      std::vector<Lit> lits = db_[confl].lits;
      int max_level = 0;
      for (Lit l : lits) max_level = std::max(max_level, levels_[l.var()]);
      if (max_level == 0) {
        ok_ = false;
        core.clear();
        return SearchResult::kUnsat;
      }
      if (max_level < decision_level()) cancel_until(max_level);
      int backjump = 0;
      analyze(std::move(lits), learnt, backjump);
      if (config_.self_check) {
        int at_level = 0;
        for (Lit l : learnt) {
          if (!is_false(l)) throw std::logic_error("self-check: learnt literal not false");
          at_level += levels_[l.var()] == decision_level() ? 1 : 0;
        }
        if (at_level != 1) throw std::logic_error("self-check: learnt clause not asserting");
      }
      cancel_until(backjump);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoRef);
      } else {
        const CRef cr = alloc(learnt, Origin::kExplanation, true, true);
        bump_clause(db_[cr]);
        enqueue(learnt[0], cr);
      }
      var_inc_ /= config_.var_decay;
      cla_inc_ /= config_.clause_decay;
      continue;
    }

    if (restart_pending_) {
      // A unit clause was added during search; re-root so it holds permanently.
      restart_pending_ = false;
      cancel_until(0);
      for (CRef r = 0; r < static_cast<CRef>(db_.size()); ++r) {
        const auto& c = db_[r];
        if (!c.live || c.learnt || c.transient || c.lits.size() != 1) continue;
        if (is_false(c.lits[0])) {
          ok_ = false;
          core.clear();
          return SearchResult::kUnsat;
        }
        if (value(c.lits[0]) == LBool::kUndef) enqueue(c.lits[0], r);
      }
      continue;
    }
    if (out_of_budget()) return SearchResult::kBudget;
    if (conflict_limit != 0 && local_conflicts >= conflict_limit) return SearchResult::kRestart;
    if (num_learnts_ >= std::max(config_.learnt_floor, 2 * num_originals_)) reduce_learnts();

    Lit next = kNoLit;
    while (decision_level() < static_cast<int>(assumptions.size())) {
      const Lit a = assumptions[decision_level()];
      if (is_true(a)) {
        new_decision_level();
      } else if (is_false(a)) {
        analyze_final(a, core);
        return SearchResult::kUnsat;
      } else {
        next = a;
        break;
      }
    }
    if (next == kNoLit) {
      next = pick_branch();
      if (next == kNoLit && brancher_) {
        next = brancher_();
        // Creating the literal may have propagated or conflicted.
        if (pending_conflict_ != kNoRef || qhead_ < trail_.size() || restart_pending_) continue;
        if (next != kNoLit && value(next) != LBool::kUndef) continue;
      }
      if (next == kNoLit) return SearchResult::kSat;
    }
    ++stats_.decisions;
    new_decision_level();
    enqueue(next, kNoRef);
  }
}

SolveOutcome Engine::solve(std::span<const Lit> assumptions) {
  for (Lit a : assumptions) {
    if (!a.valid() || a.var() > num_vars()) throw std::invalid_argument("assumption refers to unknown variable");
  }
  SolveOutcome out;
  if (!propagate_root()) {
    out.status = SolveStatus::kUnsat;
    return out;
  }
  double limit = static_cast<double>(config_.restart_base);
  for (;;) {
    const std::uint64_t conflict_limit =
        config_.restarts ? static_cast<std::uint64_t>(std::llround(limit)) : 0;
    const SearchResult r = search(conflict_limit, assumptions, out.core);
    if (r == SearchResult::kRestart) {
      ++stats_.restarts;
      cancel_until(0);
      limit *= config_.restart_multiplier;
      continue;
    }
    if (r == SearchResult::kSat) {
      out.status = SolveStatus::kSat;
      out.model = assigns_;
    } else if (r == SearchResult::kUnsat) {
      out.status = SolveStatus::kUnsat;
    } else {
      out.status = SolveStatus::kUnknown;
    }
    break;
  }
  cancel_until(0);
  return out;
}

}  // namespace softcore::sat
