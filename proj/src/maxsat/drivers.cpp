#include "softcore/maxsat/drivers.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "softcore/cp/model.hpp"

namespace softcore::maxsat {

using sat::Lit;
using Clock = std::chrono::steady_clock;

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kBnb: return "bnb";
    case Algorithm::kWpm1: return "wpm1";
    case Algorithm::kMsu3: return "msu3";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "bnb") return Algorithm::kBnb;
  if (name == "wpm1" || name == "msu1") return Algorithm::kWpm1;
  if (name == "msu3") return Algorithm::kMsu3;
  return std::nullopt;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kUnsatisfiable: return "unsatisfiable";
    case Status::kUnknown: return "unknown";
  }
  return "?";
}

std::vector<SoftClause> wrap_indicators(std::span<const std::pair<Lit, Weight>> indicators) {
  std::unordered_set<Lit> seen;
  std::vector<SoftClause> out;
  out.reserve(indicators.size());
  for (const auto& [lit, weight] : indicators) {
    if (!lit.valid()) throw std::invalid_argument("invalid indicator literal");
    if (weight <= 0) throw std::invalid_argument("indicator weight must be positive");
    if (!seen.insert(lit).second) {
      throw std::invalid_argument("duplicate indicator literal " + std::to_string(lit.to_dimacs()));
    }
    out.push_back(SoftClause{{lit}, weight, lit, 0});
  }
  return out;
}

namespace {

// Budget, timing and counters for one driver run.
class Run {
 public:
  Run(sat::Engine& engine, const DriverOptions& opts)
      : engine_(engine), opts_(opts), start_(Clock::now()), base_(engine.stats()) {
    sat::Budget budget;
    if (opts.timeout_s) {
      budget.deadline =
          start_ + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*opts.timeout_s));
    }
    if (opts.tick_limit) budget.ticks = base_.ticks + *opts.tick_limit;
    engine.set_budget(budget);
  }

  sat::SolveOutcome solve(std::span<const Lit> assumptions) {
    ++solves_;
    return engine_.solve(assumptions);
  }

  void incumbent(OptimizeResult& r, Weight z, std::vector<sat::LBool> model) {
    r.z = z;
    r.model = std::move(model);
    r.incumbents.push_back(z);
    if (opts_.on_incumbent) opts_.on_incumbent(z);
  }

  void finish(OptimizeResult& r) {
    const auto& now = engine_.stats();
    r.stats.conflicts = now.conflicts - base_.conflicts;
    r.stats.decisions = now.decisions - base_.decisions;
    r.stats.propagations = now.propagations - base_.propagations;
    r.stats.restarts = now.restarts - base_.restarts;
    r.stats.ticks = now.ticks - base_.ticks;
    r.stats.solves = solves_;
    r.stats.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    engine_.set_budget({});
  }

 private:
  sat::Engine& engine_;
  const DriverOptions& opts_;
  Clock::time_point start_;
  sat::EngineStats base_;
  std::uint64_t solves_ = 0;
};

// The objective constraint sum(w_j v_j) < bound, tightened in place.
class ObjectiveBound {
 public:
  ObjectiveBound(sat::Engine& engine, PbEncoding encoding) : engine_(engine), encoding_(encoding) {}

  void add_term(Weight w, Lit v) { terms_.push_back({w, v}); }

  Weight evaluate(const sat::SolveOutcome& out) const {
    Weight z = 0;
    for (const auto& t : terms_) z += out.value(t.lit) ? t.weight : 0;
    return z;
  }

  void tighten(Weight strict_bound) {
    if (encoding_ == PbEncoding::kPropagator) {
      if (!posted_) {
        std::vector<sat::Var> vars;
        for (const auto& t : terms_) vars.push_back(t.lit.var());
        id_ = engine_.attach_propagator(std::make_unique<cp::PbUpperBound>(terms_, strict_bound), vars);
        posted_ = true;
      } else {
        static_cast<cp::PbUpperBound&>(engine_.propagator(id_)).set_bound(strict_bound);
        engine_.propagate_root();
      }
    } else {
      if (!handles_.empty()) engine_.retract(handles_);
      handles_ = cp::encode_pb_upper_bound(engine_, terms_, strict_bound);
    }
  }

 private:
  sat::Engine& engine_;
  PbEncoding encoding_;
  std::vector<cp::PbTerm> terms_;
  bool posted_ = false;
  sat::PropagatorId id_ = 0;
  std::vector<sat::ClauseHandle> handles_;
};

// Soft ids ordered for assumption: priority descending, then id ascending.
template <typename Priority>
std::vector<int> assumption_order(std::vector<int> ids, Priority priority) {
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
    const auto pa = priority(a);
    const auto pb = priority(b);
    return pa != pb ? pa > pb : a < b;
  });
  return ids;
}

std::vector<int> sorted_unique(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

// Violator v_j for each soft: fused with the indicator when there is one.
std::vector<Lit> add_violators(sat::Engine& engine, std::span<const SoftClause> softs) {
  std::vector<Lit> violators;
  violators.reserve(softs.size());
  for (const auto& s : softs) {
    if (s.indicator.valid()) {
      violators.push_back(~s.indicator);
      continue;
    }
    const Lit v = engine.new_bool_var();
    std::vector<Lit> lits = s.lits;
    lits.push_back(v);
    engine.add_clause(lits, sat::Origin::kRelaxation);
    violators.push_back(v);
  }
  return violators;
}

}  // namespace

OptimizeResult solve_bnb(sat::Engine& engine, std::span<const SoftClause> softs, const DriverOptions& opts) {
  OptimizeResult r;
  Run run(engine, opts);
  const std::vector<Lit> violators = add_violators(engine, softs);
  ObjectiveBound bound(engine, opts.pb_encoding);
  for (std::size_t j = 0; j < softs.size(); ++j) bound.add_term(softs[j].weight, violators[j]);

  for (;;) {
    sat::SolveOutcome out = run.solve({});
    if (out.status == sat::SolveStatus::kSat) {
      const Weight z = bound.evaluate(out);
      run.incumbent(r, z, std::move(out.model));
      bound.tighten(z);
      continue;
    }
    if (out.status == sat::SolveStatus::kUnsat) {
      r.status = r.z ? Status::kOptimal : Status::kUnsatisfiable;
      if (r.z) r.lower_bound = *r.z;
    }
    break;
  }
  run.finish(r);
  return r;
}

OptimizeResult solve_wpm1(sat::Engine& engine, std::span<const SoftClause> softs, const DriverOptions& opts) {
  struct Item {
    std::vector<Lit> lits;  // original plus violators so far
    Weight weight;
    Lit assumption;
    sat::ClauseHandle handle;
    int soft_id;
    std::int64_t priority;
  };
  OptimizeResult r;
  Run run(engine, opts);
  std::vector<Item> items;
  std::unordered_map<Lit, int> by_assumption;

  auto store = [&](Item& item) {
    std::vector<Lit> lits = item.lits;
    lits.push_back(~item.assumption);
    item.handle = engine.add_clause(lits, sat::Origin::kRelaxation).handle;
  };
  auto add_item = [&](std::vector<Lit> lits, Weight w, int soft_id, std::int64_t priority) {
    Item item{std::move(lits), w, engine.new_bool_var(), {}, soft_id, priority};
    store(item);
    by_assumption.emplace(item.assumption, static_cast<int>(items.size()));
    items.push_back(std::move(item));
  };
  for (std::size_t j = 0; j < softs.size(); ++j) {
    add_item(softs[j].lits, softs[j].weight, static_cast<int>(j), softs[j].priority);
  }

  Weight z_min = 0;
  for (;;) {
    std::vector<int> ids(items.size());
    std::iota(ids.begin(), ids.end(), 0);
    const auto order = assumption_order(std::move(ids), [&](int k) { return items[k].priority; });
    std::vector<Lit> assumptions;
    assumptions.reserve(order.size());
    for (int k : order) assumptions.push_back(items[k].assumption);

    sat::SolveOutcome out = run.solve(assumptions);
    if (out.status == sat::SolveStatus::kSat) {
      r.status = Status::kOptimal;
      r.lower_bound = z_min;
      run.incumbent(r, z_min, std::move(out.model));
      break;
    }
    if (out.status == sat::SolveStatus::kUnknown) {
      r.lower_bound = z_min;
      break;
    }
    std::vector<int> core;
    for (Lit a : out.core) core.push_back(by_assumption.at(a));
    core = sorted_unique(std::move(core));
    if (core.empty()) {
      r.status = Status::kUnsatisfiable;
      r.lower_bound = z_min;
      break;
    }
    std::vector<int> soft_ids;
    Weight w_min = items[core.front()].weight;
    for (int k : core) {
      soft_ids.push_back(items[k].soft_id);
      w_min = std::min(w_min, items[k].weight);
    }
    soft_ids = sorted_unique(std::move(soft_ids));
    r.cores.push_back({soft_ids, false, 0});
    z_min += w_min;

    std::vector<sat::ClauseHandle> old;
    for (int k : core) old.push_back(items[k].handle);
    engine.retract(old);  // also deletes every learnt clause
    std::vector<Lit> fresh;
    for (int k : core) {
      if (items[k].weight > w_min) {
        add_item(items[k].lits, items[k].weight - w_min, items[k].soft_id, items[k].priority);
      }
      const Lit v = engine.new_bool_var();
      items[k].lits.push_back(v);
      items[k].weight = w_min;
      store(items[k]);
      fresh.push_back(v);
    }
    for (std::size_t a = 0; a < fresh.size(); ++a) {
      for (std::size_t b = a + 1; b < fresh.size(); ++b) {
        engine.add_clause({~fresh[a], ~fresh[b]}, sat::Origin::kRelaxation);
      }
    }
    r.rounds.push_back({soft_ids, core.size(), w_min, z_min});
  }
  run.finish(r);
  return r;
}

OptimizeResult solve_msu3(sat::Engine& engine, std::span<const SoftClause> softs, const DriverOptions& opts) {
  OptimizeResult r;
  Run run(engine, opts);
  const std::vector<Lit> violators = add_violators(engine, softs);
  ObjectiveBound bound(engine, opts.pb_encoding);
  std::unordered_map<Lit, int> by_temporary;
  for (std::size_t j = 0; j < softs.size(); ++j) {
    bound.add_term(softs[j].weight, violators[j]);
    by_temporary.emplace(~violators[j], static_cast<int>(j));
  }
  std::vector<int> active(softs.size());
  std::iota(active.begin(), active.end(), 0);

  for (;;) {
    const auto order = assumption_order(active, [&](int j) { return softs[j].priority; });
    std::vector<Lit> assumptions;
    assumptions.reserve(order.size());
    for (int j : order) assumptions.push_back(~violators[j]);

    sat::SolveOutcome out = run.solve(assumptions);
    if (out.status == sat::SolveStatus::kSat) {
      const Weight z = bound.evaluate(out);
      run.incumbent(r, z, std::move(out.model));
      bound.tighten(z);
      continue;
    }
    if (out.status == sat::SolveStatus::kUnknown) break;
    std::vector<int> temporaries;
    for (Lit a : out.core) temporaries.push_back(by_temporary.at(a));
    temporaries = sorted_unique(std::move(temporaries));
    r.cores.push_back({temporaries, r.z.has_value(), r.z.value_or(0)});
    if (temporaries.empty()) {
      r.status = r.z ? Status::kOptimal : Status::kUnsatisfiable;
      if (r.z) r.lower_bound = *r.z;
      break;
    }
    std::erase_if(active, [&](int j) { return std::binary_search(temporaries.begin(), temporaries.end(), j); });
    engine.delete_learnts();
  }
  run.finish(r);
  return r;
}

OptimizeResult solve(Algorithm algorithm, sat::Engine& engine, std::span<const SoftClause> softs,
                     const DriverOptions& opts) {
  switch (algorithm) {
    case Algorithm::kBnb: return solve_bnb(engine, softs, opts);
    case Algorithm::kWpm1: return solve_wpm1(engine, softs, opts);
    case Algorithm::kMsu3: return solve_msu3(engine, softs, opts);
  }
  throw std::invalid_argument("unknown algorithm");
}

std::vector<bool> assignment(const OptimizeResult& r, int num_vars) {
  std::vector<bool> a(static_cast<std::size_t>(num_vars) + 1, false);
  if (r.model.empty()) return a;
  for (int v = 1; v <= num_vars; ++v) a[v] = r.model[v] == sat::LBool::kTrue;
  return a;
}

namespace {

OptimizeResult solve_instance(Algorithm algorithm, const SoftInstance& inst, const DriverOptions& opts) {
  sat::Engine engine;
  for (int v = 0; v < inst.num_vars; ++v) engine.new_bool_var();

  // Priority of a soft clause: total occurrence count of its variables.
  std::vector<std::int64_t> occurrences(static_cast<std::size_t>(inst.num_vars) + 1, 0);
  for (const auto& c : inst.clauses) {
    for (Lit l : c.lits) ++occurrences[l.var()];
  }
  std::vector<SoftClause> softs;
  std::vector<int> clause_of;
  for (std::size_t j = 0; j < inst.clauses.size(); ++j) {
    const auto& c = inst.clauses[j];
    if (inst.is_hard(c)) {
      engine.add_clause(c.lits, sat::Origin::kUser);
      continue;
    }
    std::int64_t priority = 0;
    for (Lit l : c.lits) priority += occurrences[l.var()];
    softs.push_back(SoftClause{c.lits, c.weight, sat::kNoLit, priority});
    clause_of.push_back(static_cast<int>(j));
  }

  OptimizeResult r = solve(algorithm, engine, softs, opts);
  auto remap = [&](std::vector<int>& ids) {
    for (int& id : ids) id = clause_of[id];
  };
  for (auto& c : r.cores) remap(c.ids);
  for (auto& round : r.rounds) remap(round.core);

  if (r.status == Status::kOptimal) {
    const auto z = cost(inst, assignment(r, inst.num_vars));
    if (!z || *z != *r.z) throw std::logic_error("objective audit failed: reported cost differs from model cost");
  }
  return r;
}

}  // namespace

OptimizeResult solve_bnb(const SoftInstance& inst, const DriverOptions& opts) {
  return solve_instance(Algorithm::kBnb, inst, opts);
}
OptimizeResult solve_wpm1(const SoftInstance& inst, const DriverOptions& opts) {
  return solve_instance(Algorithm::kWpm1, inst, opts);
}
OptimizeResult solve_msu3(const SoftInstance& inst, const DriverOptions& opts) {
  return solve_instance(Algorithm::kMsu3, inst, opts);
}
OptimizeResult solve(Algorithm algorithm, const SoftInstance& inst, const DriverOptions& opts) {
  return solve_instance(algorithm, inst, opts);
}

std::string format_result(const OptimizeResult& r, int num_vars, bool objectives) {
  std::ostringstream out;
  if (objectives) {
    for (Weight z : r.incumbents) out << "o " << z << '\n';
  }
  switch (r.status) {
    case Status::kOptimal: out << "s OPTIMUM FOUND\n"; break;
    case Status::kUnsatisfiable: out << "s UNSATISFIABLE\n"; break;
    case Status::kUnknown: out << "s UNKNOWN\n"; break;
  }
  if (r.status == Status::kOptimal) {
    const auto a = assignment(r, num_vars);
    out << 'v';
    for (int v = 1; v <= num_vars; ++v) out << ' ' << (a[v] ? v : -v);
    out << '\n';
  }
  return out.str();
}

}  // namespace softcore::maxsat
