#include "softcore/cp/model.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>

namespace softcore::cp {

using sat::kFalse;
using sat::kTrue;
using sat::Lit;

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

int clamp_int(std::int64_t v) {
  return static_cast<int>(std::clamp<std::int64_t>(v, INT32_MIN / 2, INT32_MAX / 2));
}

// i -> sum(c*x) >= rhs with bounds propagation. Inert unless i is true.
class HalfLinear final : public sat::Propagator {
 public:
  HalfLinear(Model& model, Lit indicator, std::vector<LinearTerm> terms, std::int64_t rhs)
      : model_(model), indicator_(indicator), terms_(std::move(terms)), rhs_(rhs) {}

  bool propagate(sat::Engine& engine) override {
    if (!engine.is_true(indicator_)) return true;
    for (bool changed = true; changed;) {
      changed = false;
      std::int64_t max_sum = 0;
      std::vector<Lit> support;  // per term: the bound literal used for its maximum
      support.reserve(terms_.size());
      for (const auto& t : terms_) {
        if (t.coef > 0) {
          max_sum += t.coef * model_.ub(t.var);
          support.push_back(model_.ub_lit(t.var));
        } else {
          max_sum += t.coef * model_.lb(t.var);
          support.push_back(model_.lb_lit(t.var));
        }
      }
      if (max_sum < rhs_) {
        std::vector<Lit> nogood = support;
        nogood.push_back(indicator_);
        return engine.fail(nogood);
      }
      for (std::size_t k = 0; k < terms_.size(); ++k) {
        const auto& t = terms_[k];
        const std::int64_t own = t.coef > 0 ? t.coef * model_.ub(t.var) : t.coef * model_.lb(t.var);
        const std::int64_t need = rhs_ - (max_sum - own);  // t.coef * x >= need
        std::vector<Lit> because;
        because.reserve(terms_.size());
        because.push_back(indicator_);
        for (std::size_t m = 0; m < terms_.size(); ++m) {
          if (m != k) because.push_back(support[m]);
        }
        if (t.coef > 0) {
          const std::int64_t new_lb = ceil_div(need, t.coef);
          if (new_lb > model_.lb(t.var)) {
            if (!engine.infer(model_.lit_geq(t.var, clamp_int(new_lb)), because)) return false;
            changed = true;
            break;
          }
        } else {
          const std::int64_t new_ub = floor_div(need, t.coef);
          if (new_ub < model_.ub(t.var)) {
            if (!engine.infer(model_.lit_leq(t.var, clamp_int(new_ub)), because)) return false;
            changed = true;
            break;
          }
        }
      }
    }
    return true;
  }

 private:
  Model& model_;
  Lit indicator_;
  std::vector<LinearTerm> terms_;
  std::int64_t rhs_;
};

// Timetable (compulsory part) propagation with naive explanations.
class Cumulative final : public sat::Propagator {
 public:
  Cumulative(Model& model, std::vector<Task> tasks, int capacity)
      : model_(model), tasks_(std::move(tasks)), capacity_(capacity) {}

  bool propagate(sat::Engine& engine) override {
    for (;;) {
      const std::size_t n = tasks_.size();
      std::vector<int> est(n), lst(n);
      std::vector<int> points;
      for (std::size_t k = 0; k < n; ++k) {
        est[k] = model_.lb(tasks_[k].start);
        lst[k] = model_.ub(tasks_[k].start);
        if (lst[k] < est[k] + tasks_[k].duration) {
          points.push_back(lst[k]);
          points.push_back(est[k] + tasks_[k].duration);
        }
      }
      if (points.empty()) return true;
      std::sort(points.begin(), points.end());
      points.erase(std::unique(points.begin(), points.end()), points.end());

      struct Segment {
        int begin, end;
        int height;
        std::vector<std::size_t> tasks;
      };
      std::vector<Segment> profile;
      for (std::size_t p = 0; p + 1 < points.size(); ++p) {
        Segment seg{points[p], points[p + 1], 0, {}};
        for (std::size_t k = 0; k < n; ++k) {
          if (lst[k] <= seg.begin && est[k] + tasks_[k].duration >= seg.end) {
            seg.height += tasks_[k].demand;
            seg.tasks.push_back(k);
          }
        }
        if (seg.height > 0) profile.push_back(std::move(seg));
      }

      auto explain = [&](const Segment& seg, std::size_t skip, std::vector<Lit>& out) {
        for (std::size_t k : seg.tasks) {
          if (k == skip) continue;
          out.push_back(model_.lb_lit(tasks_[k].start));
          out.push_back(model_.ub_lit(tasks_[k].start));
        }
      };

      for (const auto& seg : profile) {
        if (seg.height > capacity_) {
          std::vector<Lit> nogood;
          explain(seg, n, nogood);
          return engine.fail(nogood);
        }
      }

      bool changed = false;
      for (std::size_t j = 0; j < n && !changed; ++j) {
        const auto& task = tasks_[j];
        const bool own_part = lst[j] < est[j] + task.duration;
        auto excl_height = [&](const Segment& seg) {
          const bool covers = own_part && lst[j] <= seg.begin && est[j] + task.duration >= seg.end;
          return seg.height - (covers ? task.demand : 0);
        };
        // Earliest start: jump over segments where j cannot fit.
        for (const auto& seg : profile) {
          if (est[j] < seg.end && est[j] + task.duration > seg.begin &&
              excl_height(seg) + task.demand > capacity_) {
            std::vector<Lit> because{model_.lb_lit(task.start)};
            explain(seg, j, because);
            if (!engine.infer(model_.lit_geq(task.start, seg.end), because)) return false;
            changed = true;
            break;
          }
        }
        if (changed) break;
        // Latest start, symmetric.
        for (auto it = profile.rbegin(); it != profile.rend(); ++it) {
          const auto& seg = *it;
          if (lst[j] < seg.end && lst[j] + task.duration > seg.begin &&
              excl_height(seg) + task.demand > capacity_) {
            std::vector<Lit> because{model_.ub_lit(task.start)};
            explain(seg, j, because);
            if (!engine.infer(model_.lit_leq(task.start, seg.begin - task.duration), because)) return false;
            changed = true;
            break;
          }
        }
      }
      if (!changed) return true;
    }
  }

 private:
  Model& model_;
  std::vector<Task> tasks_;
  int capacity_;
};

}  // namespace

bool PbUpperBound::propagate(sat::Engine& engine) {
  std::int64_t sum = 0;
  std::vector<Lit> true_lits;
  for (const auto& t : terms_) {
    if (engine.is_true(t.lit)) {
      sum += t.weight;
      true_lits.push_back(t.lit);
    }
  }
  if (sum >= bound_) return engine.fail(true_lits);
  for (const auto& t : terms_) {
    if (engine.value(t.lit) == sat::LBool::kUndef && sum + t.weight >= bound_) {
      if (!engine.infer(~t.lit, true_lits)) return false;
    }
  }
  return true;
}

Model::Model(sat::Engine& engine) : engine_(engine) {
  engine_.set_brancher([this] { return branch(); });
}

IntVar Model::new_int_var(int lb, int ub) {
  if (lb > ub) {
    throw std::invalid_argument("empty domain [" + std::to_string(lb) + ", " + std::to_string(ub) + "]");
  }
  vars_.push_back(VarData{lb, ub, {}, {}, {}});
  return IntVar{static_cast<int>(vars_.size()) - 1};
}

Lit Model::lit_geq(IntVar x, int v) {
  VarData& d = vars_.at(x.id);
  if (v <= d.lb) return kTrue;
  if (v > d.ub) return kFalse;
  if (auto it = d.geq.find(v); it != d.geq.end()) return it->second;

  const Lit lit = engine_.new_bool_var();
  auto [pos, inserted] = d.geq.emplace(v, lit);
  Lit below = kTrue;
  Lit above = kFalse;
  if (pos != d.geq.begin()) below = std::prev(pos)->second;
  if (auto next = std::next(pos); next != d.geq.end()) above = next->second;
  const std::vector<sat::PropagatorId> subscribers = d.subscribers;
  for (sat::PropagatorId id : subscribers) engine_.watch(lit.var(), id);
  // [x >= v] -> [x >= below] and [x >= above] -> [x >= v]
  engine_.add_clause({~lit, below});
  engine_.add_clause({~above, lit});
  return lit;
}

Lit Model::lit_eq(IntVar x, int v) {
  VarData& d = vars_.at(x.id);
  if (v < d.lb || v > d.ub) return kFalse;
  if (d.lb == d.ub) return kTrue;
  if (auto it = d.eq.find(v); it != d.eq.end()) return it->second;
  const Lit ge = lit_geq(x, v);
  const Lit gt = lit_geq(x, v + 1);
  const Lit lit = engine_.new_bool_var();
  vars_.at(x.id).eq.emplace(v, lit);
  engine_.add_clause({~lit, ge});
  engine_.add_clause({~lit, ~gt});
  engine_.add_clause({lit, ~ge, gt});
  return lit;
}

int Model::lb(IntVar x) const {
  const VarData& d = vars_.at(x.id);
  for (auto it = d.geq.rbegin(); it != d.geq.rend(); ++it) {
    if (engine_.is_true(it->second)) return it->first;
  }
  return d.lb;
}

int Model::ub(IntVar x) const {
  const VarData& d = vars_.at(x.id);
  for (const auto& [v, lit] : d.geq) {
    if (engine_.is_false(lit)) return v - 1;
  }
  return d.ub;
}

Lit Model::lb_lit(IntVar x) const {
  const VarData& d = vars_.at(x.id);
  for (auto it = d.geq.rbegin(); it != d.geq.rend(); ++it) {
    if (engine_.is_true(it->second)) return it->second;
  }
  return kTrue;
}

Lit Model::ub_lit(IntVar x) const {
  const VarData& d = vars_.at(x.id);
  for (const auto& [v, lit] : d.geq) {
    if (engine_.is_false(lit)) return ~lit;
  }
  return kTrue;
}

int Model::value(IntVar x, std::span<const sat::LBool> model) const {
  const VarData& d = vars_.at(x.id);
  for (auto it = d.geq.rbegin(); it != d.geq.rend(); ++it) {
    // Literals created after the model was taken are not part of it.
    if (static_cast<std::size_t>(it->second.var()) >= model.size()) continue;
    if ((model[it->second.var()] ^ it->second.negated()) == sat::LBool::kTrue) return it->first;
  }
  return d.lb;
}

void Model::subscribe(IntVar x, sat::PropagatorId id) {
  VarData& d = vars_.at(x.id);
  d.subscribers.push_back(id);
  for (const auto& [v, lit] : d.geq) engine_.watch(lit.var(), id);
}

sat::Lit Model::branch() {
  for (std::size_t k = 0; k < vars_.size(); ++k) {
    const IntVar x{static_cast<int>(k)};
    const int low = lb(x);
    if (low < ub(x)) return lit_leq(x, low);
  }
  return sat::kNoLit;
}

void Model::post_half_reified_linear(Lit indicator, std::vector<LinearTerm> terms, std::int64_t rhs) {
  if (terms.empty()) throw std::invalid_argument("linear constraint needs at least one term");
  if (engine_.fixed_at_root(indicator) && engine_.is_false(indicator)) return;
  std::erase_if(terms, [](const LinearTerm& t) { return t.coef == 0; });
  std::vector<IntVar> vars;
  for (const auto& t : terms) vars.push_back(t.var);
  auto prop = std::make_unique<HalfLinear>(*this, indicator, std::move(terms), rhs);
  std::vector<sat::Var> watched;
  if (indicator.var() != 0) watched.push_back(indicator.var());
  const sat::PropagatorId id = engine_.attach_propagator(std::move(prop), watched);
  for (IntVar x : vars) subscribe(x, id);
  if (engine_.decision_level() == 0) engine_.propagate_root();
}

std::vector<sat::ClauseHandle> Model::post_at_most_one(std::span<const Lit> lits, sat::Origin origin) {
  std::vector<sat::ClauseHandle> handles;
  for (std::size_t a = 0; a < lits.size(); ++a) {
    for (std::size_t b = a + 1; b < lits.size(); ++b) {
      handles.push_back(engine_.add_clause({~lits[a], ~lits[b]}, origin).handle);
    }
  }
  return handles;
}

PbUpperBound& Model::post_pb_upper_bound(std::vector<PbTerm> terms, std::int64_t strict_bound) {
  for (const auto& t : terms) {
    if (t.weight <= 0) throw std::invalid_argument("pseudo-Boolean weights must be positive");
  }
  if (strict_bound < 0) throw std::invalid_argument("pseudo-Boolean bound must be nonnegative");
  std::vector<sat::Var> watched;
  for (const auto& t : terms) watched.push_back(t.lit.var());
  auto prop = std::make_unique<PbUpperBound>(std::move(terms), strict_bound);
  PbUpperBound& ref = *prop;
  engine_.attach_propagator(std::move(prop), watched);
  return ref;
}

bool Model::post_cumulative(std::vector<Task> tasks, int capacity) {
  if (capacity < 1) throw std::invalid_argument("cumulative capacity must be positive");
  for (const auto& t : tasks) {
    if (t.duration < 0 || t.demand < 0) throw std::invalid_argument("negative duration or demand");
  }
  std::erase_if(tasks, [](const Task& t) { return t.duration == 0 || t.demand == 0; });
  if (tasks.empty()) return engine_.ok();
  for (const auto& t : tasks) {
    if (t.demand > capacity) {
      engine_.add_clause(std::span<const Lit>{});
      return false;
    }
  }
  std::vector<IntVar> starts;
  for (const auto& t : tasks) starts.push_back(t.start);
  auto prop = std::make_unique<Cumulative>(*this, std::move(tasks), capacity);
  const sat::PropagatorId id = engine_.attach_propagator(std::move(prop));
  for (IntVar x : starts) subscribe(x, id);
  return engine_.decision_level() == 0 ? engine_.propagate_root() : true;
}

std::vector<sat::ClauseHandle> encode_pb_upper_bound(sat::Engine& engine, std::span<const PbTerm> terms,
                                                     std::int64_t strict_bound, sat::Origin origin) {
  std::vector<sat::ClauseHandle> out;
  auto add = [&](std::initializer_list<Lit> lits) { out.push_back(engine.add_clause(lits, origin).handle); };
  const std::int64_t cap = strict_bound - 1;  // sum <= cap
  if (cap < 0) {
    out.push_back(engine.add_clause(std::span<const Lit>{}, origin).handle);
    return out;
  }
  const std::size_t n = terms.size();
  if (cap == 0) {
    for (const auto& t : terms) add({~t.lit});
    return out;
  }
  // reg[i][j-1] <=> partial sum of the first i+1 terms is >= j
  std::vector<std::vector<Lit>> reg(n);
  for (std::size_t i = 0; i < n; ++i) {
    reg[i].resize(static_cast<std::size_t>(cap));
    for (auto& r : reg[i]) r = engine.new_bool_var();
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Lit x = terms[i].lit;
    const std::int64_t w = terms[i].weight;
    if (w > cap) {
      add({~x});
    }
    for (std::int64_t j = 1; j <= std::min(w, cap); ++j) add({~x, reg[i][j - 1]});
    if (i == 0) {
      for (std::int64_t j = w + 1; j <= cap; ++j) add({~reg[0][j - 1]});
      continue;
    }
    for (std::int64_t j = 1; j <= cap; ++j) add({~reg[i - 1][j - 1], reg[i][j - 1]});
    for (std::int64_t j = 1; j + w <= cap; ++j) add({~x, ~reg[i - 1][j - 1], reg[i][j + w - 1]});
    if (cap + 1 - w >= 1 && cap + 1 - w <= cap) add({~x, ~reg[i - 1][cap - w]});
  }
  return out;
}

}  // namespace softcore::cp
