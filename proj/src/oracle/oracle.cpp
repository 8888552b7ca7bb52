#include "softcore/oracle/oracle.hpp"

#include <cstdint>
#include <limits>

#include "softcore/rcpsp/rcpsp.hpp"

namespace softcore::oracle {

using maxsat::Weight;

namespace {

struct MaskClause {
  std::uint32_t pos = 0;
  std::uint32_t neg = 0;
  bool satisfied(std::uint32_t m) const { return ((m & pos) | (~m & neg)) != 0; }
};

void guard(const maxsat::SoftInstance& inst) {
  if (inst.num_vars > kMaxVars) {
    throw Refused("instance has " + std::to_string(inst.num_vars) + " variables; enumeration limit is " +
                  std::to_string(kMaxVars));
  }
}

// Variable v maps to bit v-1.
MaskClause to_mask(const maxsat::WeightedClause& c) {
  MaskClause m;
  for (sat::Lit l : c.lits) (l.negated() ? m.neg : m.pos) |= std::uint32_t{1} << (l.var() - 1);
  return m;
}

std::vector<bool> unpack(std::uint32_t m, int n) {
  std::vector<bool> a(static_cast<std::size_t>(n) + 1, false);
  for (int v = 1; v <= n; ++v) a[v] = (m >> (v - 1)) & 1U;
  return a;
}

// Minimum violated soft weight subject to hard clauses and `forced`, or nullopt.
std::optional<std::pair<Weight, std::uint32_t>> enumerate(const maxsat::SoftInstance& inst,
                                                          const std::vector<bool>& forced) {
  std::vector<MaskClause> hard;
  std::vector<std::pair<MaskClause, Weight>> soft;
  for (std::size_t j = 0; j < inst.clauses.size(); ++j) {
    const auto& c = inst.clauses[j];
    if (inst.is_hard(c) || forced[j]) {
      hard.push_back(to_mask(c));
    } else {
      soft.emplace_back(to_mask(c), c.weight);
    }
  }
  std::optional<std::pair<Weight, std::uint32_t>> best;
  const std::uint64_t total = std::uint64_t{1} << inst.num_vars;
  for (std::uint64_t m64 = 0; m64 < total; ++m64) {
    const auto m = static_cast<std::uint32_t>(m64);
    bool ok = true;
    for (const auto& h : hard) {
      if (!h.satisfied(m)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    Weight z = 0;
    for (const auto& [s, w] : soft) z += s.satisfied(m) ? 0 : w;
    if (!best || z < best->first) best = {z, m};
  }
  return best;
}

std::vector<bool> core_mask(const maxsat::SoftInstance& inst, std::span<const int> core) {
  std::vector<bool> forced(inst.clauses.size(), false);
  for (int id : core) {
    if (id < 0 || static_cast<std::size_t>(id) >= inst.clauses.size()) {
      throw std::out_of_range("core id " + std::to_string(id) + " out of range");
    }
    forced[id] = true;
  }
  return forced;
}

}  // namespace

MaxsatResult brute_force_maxsat(const maxsat::SoftInstance& inst) {
  guard(inst);
  MaxsatResult r;
  const auto best = enumerate(inst, std::vector<bool>(inst.clauses.size(), false));
  if (best) {
    r.optimum = best->first;
    r.witness = unpack(best->second, inst.num_vars);
  }
  return r;
}

bool verify_core(const maxsat::SoftInstance& inst, std::span<const int> core) {
  guard(inst);
  return !enumerate(inst, core_mask(inst, core)).has_value();
}

bool verify_core_bounded(const maxsat::SoftInstance& inst, std::span<const int> core, Weight strict_bound) {
  guard(inst);
  const auto best = enumerate(inst, core_mask(inst, core));
  return !best || best->first >= strict_bound;
}

ScheduleResult brute_force_schedule(const rcpsp::SoftPrecedenceProblem& p) {
  const rcpsp::RcpspMax& inst = p.base;
  const std::size_t n = inst.num_tasks();
  ScheduleResult result;
  if (p.horizon < inst.max_duration()) return result;
  double grid = 1.0;
  for (int d : inst.durations) grid *= static_cast<double>(p.horizon - d + 1);
  if (grid > kMaxScheduleGrid) {
    throw Refused("schedule grid has " + std::to_string(static_cast<long long>(grid)) + " points; limit is 1e7");
  }

  // Precedences charged when the later of their two tasks is placed.
  std::vector<std::vector<std::size_t>> closing(n);
  for (std::size_t k = 0; k < inst.precedences.size(); ++k) {
    const auto& prec = inst.precedences[k];
    closing[std::max(prec.from, prec.to)].push_back(k);
  }
  std::vector<std::vector<int>> usage(inst.num_resources(), std::vector<int>(p.horizon, 0));
  std::vector<int> starts(n, 0);
  Weight best = std::numeric_limits<Weight>::max();

  auto place = [&](auto&& self, std::size_t t, Weight cost) -> void {
    if (cost >= best) return;
    if (t == n) {
      best = cost;
      result.optimum = cost;
      result.starts = starts;
      return;
    }
    const int dur = inst.durations[t];
    for (int s = 0; s + dur <= p.horizon; ++s) {
      bool fits = true;
      for (std::size_t r = 0; r < inst.num_resources() && fits; ++r) {
        for (int u = s; u < s + dur; ++u) {
          if (usage[r][u] + inst.demands[t][r] > inst.capacities[r]) {
            fits = false;
            break;
          }
        }
      }
      if (!fits) continue;
      starts[t] = s;
      Weight added = 0;
      for (std::size_t k : closing[t]) {
        const auto& prec = inst.precedences[k];
        if (starts[prec.to] - starts[prec.from] < prec.lag) added += p.weights[k];
      }
      for (std::size_t r = 0; r < inst.num_resources(); ++r) {
        for (int u = s; u < s + dur; ++u) usage[r][u] += inst.demands[t][r];
      }
      self(self, t + 1, cost + added);
      for (std::size_t r = 0; r < inst.num_resources(); ++r) {
        for (int u = s; u < s + dur; ++u) usage[r][u] -= inst.demands[t][r];
      }
    }
  };
  place(place, 0, 0);
  return result;
}

}  // namespace softcore::oracle
