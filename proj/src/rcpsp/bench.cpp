#include "softcore/rcpsp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

namespace softcore::rcpsp {

namespace fs = std::filesystem;

namespace {

int algorithm_rank(maxsat::Algorithm a) { return static_cast<int>(a); }

bool row_before(const BenchRow& a, const BenchRow& b) {
  if (a.set != b.set) return a.set < b.set;
  if (!(a.alpha == b.alpha)) return a.alpha < b.alpha;
  if (a.mode != b.mode) return a.mode < b.mode;
  if (a.algorithm != b.algorithm) return algorithm_rank(a.algorithm) < algorithm_rank(b.algorithm);
  return a.instance < b.instance;
}

maxsat::DriverOptions driver_options(const BenchConfig& cfg) {
  maxsat::DriverOptions opts;
  if (cfg.deterministic_time) {
    opts.tick_limit = static_cast<std::uint64_t>(cfg.timeout_s * 1000.0 * kTicksPerMs);
  } else {
    opts.timeout_s = cfg.timeout_s;
  }
  return opts;
}

std::string format_ms(double ms) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << ms;
  return out.str();
}

}  // namespace

std::vector<BenchRow> run_benchmark(const std::vector<BenchInstance>& instances, const BenchConfig& cfg) {
  if (cfg.timeout_s <= 0) throw std::invalid_argument("timeout must be positive");
  for (const auto& a : cfg.alphas) {
    if (a.num <= 0 || a.num > a.den) throw std::invalid_argument("alpha must lie in (0, 1]");
  }
  const maxsat::DriverOptions opts = driver_options(cfg);

  struct Cell {
    std::size_t instance;
    Fraction alpha;
    Mode mode;
    maxsat::Algorithm algorithm;
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (const auto& alpha : cfg.alphas) {
      for (Mode mode : cfg.modes) {
        for (auto algorithm : cfg.algorithms) cells.push_back({i, alpha, mode, algorithm});
      }
    }
  }

  // Makespan reference l per instance; nullopt marks hard infeasibility.
  std::vector<std::optional<int>> bounds(instances.size());
  std::vector<BenchRow> rows(cells.size());
  auto run_parallel = [&](std::size_t count, auto&& work) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k; (k = next.fetch_add(1)) < count;) work(k);
    };
    const int jobs = std::max(1, cfg.jobs);
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
  };

  run_parallel(instances.size(), [&](std::size_t i) {
    try {
      const auto& inst = instances[i].instance;
      if (cfg.bound == BoundSource::kExact) {
        const auto b = makespan_search(inst, opts);
        bounds[i] = b ? std::optional<int>(b->value) : std::nullopt;
      } else {
        bounds[i] = makespan_lower_bound(inst);
      }
    } catch (const std::invalid_argument&) {
      bounds[i] = std::nullopt;
    }
  });

  run_parallel(cells.size(), [&](std::size_t k) {
    const Cell& cell = cells[k];
    const BenchInstance& bi = instances[cell.instance];
    BenchRow& row = rows[k];
    row.set = bi.set;
    row.alpha = cell.alpha;
    row.mode = cell.mode;
    row.algorithm = cell.algorithm;
    row.instance = bi.name;
    row.status = "infeasible";
    if (!bounds[cell.instance] || *bounds[cell.instance] < 1) return;
    SoftPrecedenceProblem problem;
    try {
      problem = soften(bi.instance, cell.alpha, *bounds[cell.instance], cell.mode, cfg.seed);
    } catch (const std::invalid_argument&) {
      return;
    }
    const ScheduleResult res = solve_schedule(problem, cell.algorithm, opts);
    const auto& r = res.result;
    switch (r.status) {
      case maxsat::Status::kOptimal:
        row.status = "optimal";
        row.z_opt = r.z;
        break;
      case maxsat::Status::kUnsatisfiable: row.status = "infeasible"; break;
      case maxsat::Status::kUnknown: row.status = "timeout"; break;
    }
    row.wall_ms = cfg.deterministic_time ? static_cast<double>(r.stats.ticks) / kTicksPerMs : r.stats.wall_ms;
    if (row.status == "timeout") row.wall_ms = std::max(row.wall_ms, cfg.timeout_s * 1000.0);
    row.conflicts = r.stats.conflicts;
    row.cores = r.cores.size();
    row.incumbents = r.incumbents.size();
  });

  std::stable_sort(rows.begin(), rows.end(), row_before);
  return rows;
}

std::string to_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "set,alpha,mode,algorithm,instance,status,z_opt,wall_ms,conflicts,cores,incumbents\n";
  for (const auto& r : rows) {
    out << r.set << ',' << r.alpha.to_string() << ',' << to_string(r.mode) << ',' << maxsat::to_string(r.algorithm)
        << ',' << r.instance << ',' << r.status << ',' << (r.z_opt ? std::to_string(*r.z_opt) : "") << ','
        << format_ms(r.wall_ms) << ',' << r.conflicts << ',' << r.cores << ',' << r.incumbents << '\n';
  }
  return out.str();
}

CellSummary summarize(const std::vector<BenchRow>& rows, const std::string& set, const Fraction& alpha, Mode mode,
                      maxsat::Algorithm algorithm, double timeout_s) {
  std::map<std::string, bool> infeasible;
  for (const auto& r : rows) {
    if (r.set == set && r.alpha == alpha && r.mode == mode) infeasible[r.instance] |= r.status == "infeasible";
  }
  CellSummary s;
  double log_sum = 0.0;
  for (const auto& r : rows) {
    if (r.set != set || !(r.alpha == alpha) || r.mode != mode || r.algorithm != algorithm) continue;
    if (infeasible[r.instance]) continue;
    ++s.instances;
    double seconds = r.wall_ms / 1000.0;
    if (r.status == "timeout") {
      ++s.timeouts;
      seconds = timeout_s;
    }
    log_sum += std::log(std::max(seconds, 1e-6));
  }
  if (s.instances > 0) s.geo_mean_s = std::exp(log_sum / static_cast<double>(s.instances));
  return s;
}

std::string format_table(const std::vector<BenchRow>& rows, const BenchConfig& cfg) {
  std::vector<std::string> sets;
  for (const auto& r : rows) {
    if (std::find(sets.begin(), sets.end(), r.set) == sets.end()) sets.push_back(r.set);
  }
  std::size_t set_width = 8;
  for (const auto& s : sets) set_width = std::max(set_width, s.size() + 1);
  constexpr int kMean = 10;
  constexpr int kCount = 4;
  const std::size_t width = set_width + 5 + cfg.algorithms.size() * (kMean + kCount + 3);

  std::ostringstream out;
  const std::string rule(width, '-');
  for (Mode mode : cfg.modes) {
    out << rule << '\n' << to_string(mode) << " version\n" << rule << '\n';
    for (const auto& alpha : cfg.alphas) {
      out << std::left << std::setw(static_cast<int>(set_width)) << ("alpha " + alpha.to_string()) << std::right
          << std::setw(5) << "#ins";
      for (auto a : cfg.algorithms) {
        std::string name = maxsat::to_string(a);
        if (a == maxsat::Algorithm::kWpm1 && mode == Mode::kCardinality) name = "msu1";
        out << " | " << std::setw(kMean + kCount + 1) << name;
      }
      out << '\n';
      for (const auto& set : sets) {
        std::size_t n = 0;
        std::ostringstream cols;
        for (auto a : cfg.algorithms) {
          const CellSummary s = summarize(rows, set, alpha, mode, a, cfg.timeout_s);
          n = std::max(n, s.instances);
          cols << " | " << std::setw(kMean) << std::fixed << std::setprecision(3) << s.geo_mean_s << ' '
               << std::setw(kCount) << s.timeouts;
        }
        out << std::left << std::setw(static_cast<int>(set_width)) << set << std::right << std::setw(5) << n
            << cols.str() << '\n';
      }
      out << rule << '\n';
    }
  }
  return out.str();
}

std::vector<BenchInstance> load_instances(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw std::invalid_argument(dir + " is not a directory");
  std::vector<BenchInstance> out;
  auto load_dir = [&](const fs::path& d, const std::string& set) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(d)) {
      if (e.is_regular_file() && e.path().extension() == ".rcp") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back({set, f.stem().string(), read_instance(f.string())});
  };
  std::string root_name = root.filename().string();
  if (root_name.empty()) root_name = root.parent_path().filename().string();
  load_dir(root, root_name);
  std::vector<fs::path> subdirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) subdirs.push_back(e.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& d : subdirs) load_dir(d, d.filename().string());
  if (out.empty()) throw std::invalid_argument("no .rcp instances under " + dir);
  return out;
}

}  // namespace softcore::rcpsp
