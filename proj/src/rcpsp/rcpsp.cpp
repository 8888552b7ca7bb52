#include "softcore/rcpsp/rcpsp.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <numeric>
#include <sstream>

namespace softcore::rcpsp {

using sat::Lit;

int RcpspMax::max_duration() const {
  return durations.empty() ? 0 : *std::max_element(durations.begin(), durations.end());
}

// --- parsing ------------------------------------------------------------------

namespace {

struct Line {
  int number;
  std::vector<std::int64_t> values;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++number;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r')) ++i;
      std::size_t j = i;
      while (j < raw.size() && raw[j] != ' ' && raw[j] != '\t' && raw[j] != '\r') ++j;
      if (j > i) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(raw.data() + i, raw.data() + j, v);
        if (ec != std::errc{} || ptr != raw.data() + j || v < INT32_MIN || v > INT32_MAX) {
          throw ParseError(number, "expected an integer, got '" + std::string(raw.substr(i, j - i)) + "'");
        }
        line.values.push_back(v);
      }
      i = j;
    }
    if (!line.values.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

RcpspMax parse_instance(std::string_view text) {
  const auto lines = tokenize(text);
  if (lines.empty()) throw ParseError(1, "empty instance");
  const auto& header = lines[0];
  if (header.values.size() != 2) throw ParseError(header.number, "header must be '<tasks> <resources>'");
  const auto n = header.values[0];
  const auto r = header.values[1];
  if (n < 0 || r < 0) throw ParseError(header.number, "negative count in header");
  if (lines.size() < static_cast<std::size_t>(n) + 2) {
    throw ParseError(lines.back().number, "expected " + std::to_string(n) + " task lines and a capacity line");
  }
  RcpspMax inst;
  for (std::int64_t t = 0; t < n; ++t) {
    const auto& line = lines[1 + t];
    if (line.values.size() != static_cast<std::size_t>(r) + 1) {
      throw ParseError(line.number, "task line needs a duration and " + std::to_string(r) + " demands");
    }
    for (auto v : line.values) {
      if (v < 0) throw ParseError(line.number, "negative duration or demand");
    }
    inst.durations.push_back(static_cast<int>(line.values[0]));
    inst.demands.emplace_back(line.values.begin() + 1, line.values.end());
  }
  const auto& caps = lines[1 + n];
  if (caps.values.size() != static_cast<std::size_t>(r)) {
    throw ParseError(caps.number, "capacity line needs " + std::to_string(r) + " values");
  }
  for (auto v : caps.values) {
    if (v < 1) throw ParseError(caps.number, "capacities must be positive");
    inst.capacities.push_back(static_cast<int>(v));
  }
  for (std::size_t k = static_cast<std::size_t>(n) + 2; k < lines.size(); ++k) {
    const auto& line = lines[k];
    if (line.values.size() != 3) throw ParseError(line.number, "precedence line must be '<from> <to> <lag>'");
    const auto from = line.values[0];
    const auto to = line.values[1];
    if (from < 1 || from > n || to < 1 || to > n) throw ParseError(line.number, "task index out of range");
    if (from == to) throw ParseError(line.number, "precedence from a task to itself");
    inst.precedences.push_back({static_cast<int>(from - 1), static_cast<int>(to - 1), static_cast<int>(line.values[2])});
  }
  return inst;
}

RcpspMax read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

std::string serialize_instance(const RcpspMax& inst) {
  std::ostringstream out;
  out << inst.num_tasks() << ' ' << inst.num_resources() << '\n';
  for (std::size_t t = 0; t < inst.num_tasks(); ++t) {
    out << inst.durations[t];
    for (int d : inst.demands[t]) out << ' ' << d;
    out << '\n';
  }
  for (std::size_t k = 0; k < inst.capacities.size(); ++k) out << (k ? " " : "") << inst.capacities[k];
  out << '\n';
  for (const auto& p : inst.precedences) out << p.from + 1 << ' ' << p.to + 1 << ' ' << p.lag << '\n';
  return out.str();
}

// --- fractions ------------------------------------------------------------------

Fraction Fraction::parse(std::string_view text) {
  auto to_int = [&](std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      throw std::invalid_argument("not a fraction: '" + std::string(text) + "'");
    }
    return v;
  };
  Fraction f;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    f.num = to_int(text.substr(0, slash));
    f.den = to_int(text.substr(slash + 1));
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto frac = text.substr(dot + 1);
    if (frac.size() > 9) throw std::invalid_argument("too many decimals: '" + std::string(text) + "'");
    const std::int64_t whole = dot == 0 ? 0 : to_int(text.substr(0, dot));
    f.den = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) f.den *= 10;
    f.num = whole * f.den + (frac.empty() ? 0 : to_int(frac));
  } else {
    f.num = to_int(text);
    f.den = 1;
  }
  if (f.den <= 0 || f.num < 0) throw std::invalid_argument("fraction must be nonnegative: '" + std::string(text) + "'");
  const auto g = std::gcd(f.num, f.den);
  if (g > 1) {
    f.num /= g;
    f.den /= g;
  }
  return f;
}

std::int64_t Fraction::floor_times(std::int64_t l) const { return num * l / den; }

std::string Fraction::to_string() const {
  std::int64_t scale = 1;
  for (int digits = 0; digits <= 6; ++digits, scale *= 10) {
    if (scale % den != 0) continue;
    const std::int64_t scaled = num * (scale / den);
    std::string s = std::to_string(scaled / scale);
    if (digits > 0) {
      std::string frac = std::to_string(scaled % scale);
      frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
      s += "." + frac;
    }
    return s;
  }
  return std::to_string(num) + "/" + std::to_string(den);
}

std::string to_string(Mode m) { return m == Mode::kCardinality ? "cardinality" : "weighted"; }

std::optional<Mode> parse_mode(std::string_view name) {
  if (name == "cardinality") return Mode::kCardinality;
  if (name == "weighted") return Mode::kWeighted;
  return std::nullopt;
}

// --- bounds ---------------------------------------------------------------------

int makespan_lower_bound(const RcpspMax& inst) {
  const std::size_t n = inst.num_tasks();
  std::vector<std::int64_t> est(n, 0);
  bool changed = true;
  for (std::size_t pass = 0; changed; ++pass) {
    if (pass > n) throw std::invalid_argument("precedences contain a positive-length cycle");
    changed = false;
    for (const auto& p : inst.precedences) {
      if (est[p.from] + p.lag > est[p.to]) {
        est[p.to] = est[p.from] + p.lag;
        changed = true;
      }
    }
  }
  std::int64_t bound = 0;
  for (std::size_t t = 0; t < n; ++t) bound = std::max(bound, est[t] + inst.durations[t]);
  for (std::size_t r = 0; r < inst.num_resources(); ++r) {
    std::int64_t energy = 0;
    for (std::size_t t = 0; t < n; ++t) energy += std::int64_t{inst.durations[t]} * inst.demands[t][r];
    const std::int64_t cap = inst.capacities[r];
    bound = std::max(bound, (energy + cap - 1) / cap);
  }
  return static_cast<int>(bound);
}

std::optional<MakespanBound> makespan_search(const RcpspMax& inst, const maxsat::DriverOptions& opts) {
  std::int64_t cap = 0;
  for (int d : inst.durations) cap += d;
  for (const auto& p : inst.precedences) cap += std::max(p.lag, 0);
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t ticks_used = 0;
  for (std::int64_t h = std::max(makespan_lower_bound(inst), inst.max_duration()); h <= cap; ++h) {
    sat::Engine engine;
    cp::Model model(engine);
    std::vector<cp::IntVar> starts;
    for (int d : inst.durations) starts.push_back(model.new_int_var(0, static_cast<int>(h) - d));
    for (std::size_t r = 0; r < inst.num_resources(); ++r) {
      std::vector<cp::Task> tasks;
      for (std::size_t t = 0; t < inst.num_tasks(); ++t) {
        tasks.push_back({starts[t], inst.durations[t], inst.demands[t][r]});
      }
      model.post_cumulative(std::move(tasks), inst.capacities[r]);
    }
    for (const auto& p : inst.precedences) model.post_linear({{1, starts[p.to]}, {-1, starts[p.from]}}, p.lag);

    sat::Budget budget;
    if (opts.timeout_s) {
      budget.deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                    std::chrono::duration<double>(*opts.timeout_s));
    }
    if (opts.tick_limit) {
      if (ticks_used >= *opts.tick_limit) return MakespanBound{static_cast<int>(h), false};
      budget.ticks = *opts.tick_limit - ticks_used;
    }
    engine.set_budget(budget);
    const auto out = engine.solve();
    ticks_used += engine.stats().ticks;
    if (out.status == sat::SolveStatus::kSat) return MakespanBound{static_cast<int>(h), true};
    if (out.status == sat::SolveStatus::kUnknown) return MakespanBound{static_cast<int>(h), false};
  }
  return std::nullopt;
}

std::optional<int> exact_makespan(const RcpspMax& inst, const maxsat::DriverOptions& opts) {
  const auto b = makespan_search(inst, opts);
  if (!b || !b->exact) return std::nullopt;
  return b->value;
}

// --- softening ----------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + (k + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Weight precedence_weight(std::uint64_t seed, std::size_t k) {
  return 1 + static_cast<Weight>(splitmix64(seed, k) % 10);
}

SoftPrecedenceProblem soften(const RcpspMax& inst, Fraction alpha, int l, Mode mode, std::uint64_t seed) {
  if (alpha.num <= 0 || alpha.num > alpha.den) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (l < 1) throw std::invalid_argument("makespan bound must be at least 1");
  SoftPrecedenceProblem p;
  p.base = inst;
  p.alpha = alpha;
  p.lower_bound = l;
  p.horizon = static_cast<int>(alpha.floor_times(l));
  p.mode = mode;
  if (p.horizon < inst.max_duration()) {
    throw std::invalid_argument("horizon " + std::to_string(p.horizon) + " is shorter than the longest task");
  }
  for (std::size_t k = 0; k < inst.precedences.size(); ++k) {
    p.weights.push_back(mode == Mode::kCardinality ? 1 : precedence_weight(seed, k));
  }
  return p;
}

// --- model ----------------------------------------------------------------------------

BuiltModel build_model(const SoftPrecedenceProblem& p, cp::Model& model) {
  const RcpspMax& inst = p.base;
  BuiltModel built;
  for (int d : inst.durations) {
    if (d > p.horizon) throw std::invalid_argument("task longer than the horizon");
    built.starts.push_back(model.new_int_var(0, p.horizon - d));
  }
  for (std::size_t r = 0; r < inst.num_resources(); ++r) {
    std::vector<cp::Task> tasks;
    for (std::size_t t = 0; t < inst.num_tasks(); ++t) {
      tasks.push_back({built.starts[t], inst.durations[t], inst.demands[t][r]});
    }
    if (!model.post_cumulative(std::move(tasks), inst.capacities[r])) built.root_feasible = false;
  }
  sat::Engine& engine = model.engine();
  for (std::size_t k = 0; k < inst.precedences.size(); ++k) {
    const auto& prec = inst.precedences[k];
    const Lit i = engine.new_bool_var();
    model.post_half_reified_linear(i, {{1, built.starts[prec.to]}, {-1, built.starts[prec.from]}}, prec.lag);
    built.indicators.emplace_back(i, p.weights[k]);
  }
  if (!engine.ok()) built.root_feasible = false;
  return built;
}

std::optional<Weight> schedule_cost(const SoftPrecedenceProblem& p, const std::vector<int>& starts) {
  const RcpspMax& inst = p.base;
  if (starts.size() != inst.num_tasks()) return std::nullopt;
  for (std::size_t t = 0; t < inst.num_tasks(); ++t) {
    if (starts[t] < 0 || starts[t] + inst.durations[t] > p.horizon) return std::nullopt;
  }
  for (std::size_t r = 0; r < inst.num_resources(); ++r) {
    std::vector<int> usage(static_cast<std::size_t>(std::max(p.horizon, 0)), 0);
    for (std::size_t t = 0; t < inst.num_tasks(); ++t) {
      for (int u = starts[t]; u < starts[t] + inst.durations[t]; ++u) usage[u] += inst.demands[t][r];
    }
    for (int u : usage) {
      if (u > inst.capacities[r]) return std::nullopt;
    }
  }
  Weight cost = 0;
  for (std::size_t k = 0; k < inst.precedences.size(); ++k) {
    const auto& prec = inst.precedences[k];
    if (starts[prec.to] - starts[prec.from] < prec.lag) cost += p.weights[k];
  }
  return cost;
}

ScheduleResult solve_schedule(const SoftPrecedenceProblem& p, maxsat::Algorithm algorithm,
                              const maxsat::DriverOptions& opts) {
  sat::Engine engine;
  cp::Model model(engine);
  const BuiltModel built = build_model(p, model);
  const auto softs = maxsat::wrap_indicators(built.indicators);
  ScheduleResult out;
  out.result = maxsat::solve(algorithm, engine, softs, opts);
  if (!out.result.z) return out;

  const auto& r = out.result;
  for (cp::IntVar x : built.starts) out.starts.push_back(model.value(x, r.model));
  Weight false_weight = 0;
  for (std::size_t k = 0; k < built.indicators.size(); ++k) {
    const bool on = r.value(built.indicators[k].first);
    out.enforced.push_back(on);
    if (!on) false_weight += built.indicators[k].second;
    const auto& prec = p.base.precedences[k];
    if (on && out.starts[prec.to] - out.starts[prec.from] < prec.lag) {
      throw std::logic_error("schedule audit: enforced precedence " + std::to_string(k + 1) + " violated");
    }
  }
  const auto cost = schedule_cost(p, out.starts);
  if (!cost) throw std::logic_error("schedule audit: start domain or resource capacity violated");
  if (false_weight != *r.z) throw std::logic_error("schedule audit: reported cost differs from indicator weight");
  if (*cost > *r.z) throw std::logic_error("schedule audit: violated precedences exceed reported cost");
  if (r.status == maxsat::Status::kOptimal && *cost != *r.z) {
    throw std::logic_error("schedule audit: optimal cost differs from schedule cost");
  }
  return out;
}

// --- generator ----------------------------------------------------------------------

RcpspMax generate_instance(std::uint64_t seed, const GeneratorConfig& cfg) {
  if (cfg.tasks < 1 || cfg.resources < 0 || cfg.max_duration < 1 || cfg.max_capacity < 1) {
    throw std::invalid_argument("invalid generator configuration");
  }
  std::uint64_t k = 0;
  auto draw = [&](std::int64_t lo, std::int64_t hi) {
    return static_cast<int>(lo + static_cast<std::int64_t>(splitmix64(seed, k++) % static_cast<std::uint64_t>(hi - lo + 1)));
  };
  RcpspMax inst;
  for (int r = 0; r < cfg.resources; ++r) inst.capacities.push_back(draw(std::min(2, cfg.max_capacity), cfg.max_capacity));
  for (int t = 0; t < cfg.tasks; ++t) {
    inst.durations.push_back(draw(1, cfg.max_duration));
    std::vector<int> dem;
    for (int r = 0; r < cfg.resources; ++r) dem.push_back(draw(0, inst.capacities[r]));
    inst.demands.push_back(std::move(dem));
  }
  // Keeps the last precedence only if it closes no positive cycle.
  auto keep_acyclic = [&] {
    try {
      makespan_lower_bound(inst);
      return true;
    } catch (const std::invalid_argument&) {
      inst.precedences.pop_back();
      return false;
    }
  };
  for (int a = 0; a < cfg.tasks; ++a) {
    for (int b = a + 1; b < cfg.tasks; ++b) {
      if (draw(0, 99) >= cfg.edge_percent) continue;
      inst.precedences.push_back({a, b, inst.durations[a]});
      const bool forward = keep_acyclic();
      const bool max_lag = draw(0, 99) < cfg.max_lag_percent;
      const int slack = draw(0, 3);
      if (forward && max_lag) {
        inst.precedences.push_back({b, a, -(inst.durations[a] + slack)});
        keep_acyclic();
      }
    }
  }
  return inst;
}

}  // namespace softcore::rcpsp
