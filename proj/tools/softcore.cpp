#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "softcore/maxsat/drivers.hpp"
#include "softcore/oracle/oracle.hpp"
#include "softcore/rcpsp/bench.hpp"
#include "softcore/rcpsp/rcpsp.hpp"

namespace {

using namespace softcore;

constexpr int kExitOk = 0;
constexpr int kExitUnknown = 1;  // solve: budget exhausted; verify: check failed
constexpr int kExitError = 2;
constexpr int kExitRefused = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

maxsat::Algorithm algorithm_of(const std::string& name) {
  const auto a = maxsat::parse_algorithm(name);
  if (!a) throw UsageError("unknown algorithm '" + name + "' (bnb, wpm1, msu3)");
  return *a;
}

std::vector<maxsat::Algorithm> algorithms_of(const std::string& list) {
  if (list == "all") return {maxsat::Algorithm::kBnb, maxsat::Algorithm::kWpm1, maxsat::Algorithm::kMsu3};
  std::vector<maxsat::Algorithm> out;
  for (const auto& name : split_list(list)) out.push_back(algorithm_of(name));
  if (out.empty()) throw UsageError("no algorithm given");
  return out;
}

rcpsp::Mode mode_of(const std::string& name) {
  const auto m = rcpsp::parse_mode(name);
  if (!m) throw UsageError("unknown mode '" + name + "' (cardinality, weighted)");
  return *m;
}

std::vector<rcpsp::Mode> modes_of(const std::string& list) {
  if (list == "both") return {rcpsp::Mode::kCardinality, rcpsp::Mode::kWeighted};
  std::vector<rcpsp::Mode> out;
  for (const auto& name : split_list(list)) out.push_back(mode_of(name));
  if (out.empty()) throw UsageError("no mode given");
  return out;
}

rcpsp::Fraction alpha_of(const std::string& text) {
  rcpsp::Fraction a;
  try {
    a = rcpsp::Fraction::parse(text);
  } catch (const std::exception&) {
    throw UsageError("malformed alpha '" + text + "'");
  }
  if (a.num <= 0 || a.num > a.den) throw UsageError("alpha must lie in (0, 1]");
  return a;
}

rcpsp::BoundSource bound_of(const std::string& name) {
  if (name == "exact") return rcpsp::BoundSource::kExact;
  if (name == "lower") return rcpsp::BoundSource::kLowerBound;
  throw UsageError("unknown bound source '" + name + "' (exact, lower)");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int exit_for(maxsat::Status s) { return s == maxsat::Status::kUnknown ? kExitUnknown : kExitOk; }

// --- solve-wcnf -----------------------------------------------------------------

struct SolveWcnfArgs {
  std::string path;
  std::string algorithm = "msu3";
  double timeout_s = 600.0;
  std::string encoding = "propagator";
};

int cmd_solve_wcnf(const SolveWcnfArgs& args) {
  const auto inst = maxsat::read_wcnf(args.path);
  maxsat::DriverOptions opts;
  opts.timeout_s = args.timeout_s;
  if (args.encoding == "counter") {
    opts.pb_encoding = maxsat::PbEncoding::kCounter;
  } else if (args.encoding != "propagator") {
    throw UsageError("unknown encoding '" + args.encoding + "' (propagator, counter)");
  }
  opts.on_incumbent = [](maxsat::Weight z) { std::cout << "o " << z << std::endl; };
  const auto algorithm = algorithm_of(args.algorithm);
  std::cout << "c algorithm " << maxsat::to_string(algorithm) << " vars " << inst.num_vars << " clauses "
            << inst.clauses.size() << " soft " << inst.num_soft() << '\n';
  const auto r = maxsat::solve(algorithm, inst, opts);
  std::cout << "c conflicts " << r.stats.conflicts << " cores " << r.cores.size() << " lower_bound "
            << r.lower_bound << " wall_ms " << r.stats.wall_ms << '\n';
  std::cout << maxsat::format_result(r, inst.num_vars, false);
  return exit_for(r.status);
}

// --- solve-rcpsp ----------------------------------------------------------------

struct SolveRcpspArgs {
  std::string path;
  std::string algorithm = "msu3";
  double timeout_s = 600.0;
  std::string alpha = "0.8";
  std::string mode = "cardinality";
  std::uint64_t seed = 1;
  std::string bound = "exact";
  int lower_bound = 0;
};

int cmd_solve_rcpsp(const SolveRcpspArgs& args) {
  const auto inst = rcpsp::read_instance(args.path);
  maxsat::DriverOptions opts;
  opts.timeout_s = args.timeout_s;
  int l = args.lower_bound;
  if (l <= 0) {
    if (bound_of(args.bound) == rcpsp::BoundSource::kExact) {
      const auto b = rcpsp::makespan_search(inst, opts);
      if (!b) {
        std::cout << "c no feasible schedule with hard precedences\ns UNSATISFIABLE\n";
        return kExitOk;
      }
      l = b->value;
      if (!b->exact) std::cout << "c makespan search timed out, using proven bound\n";
    } else {
      l = rcpsp::makespan_lower_bound(inst);
    }
  }
  rcpsp::SoftPrecedenceProblem p;
  try {
    p = rcpsp::soften(inst, alpha_of(args.alpha), l, mode_of(args.mode), args.seed);
  } catch (const std::invalid_argument& e) {
    std::cout << "c " << e.what() << "\ns UNSATISFIABLE\n";
    return kExitOk;
  }
  opts.on_incumbent = [](maxsat::Weight z) { std::cout << "o " << z << std::endl; };
  const auto algorithm = algorithm_of(args.algorithm);
  std::cout << "c tasks " << inst.num_tasks() << " resources " << inst.num_resources() << " precedences "
            << inst.precedences.size() << " l " << l << " horizon " << p.horizon << '\n';
  const auto res = rcpsp::solve_schedule(p, algorithm, opts);
  const auto& r = res.result;
  switch (r.status) {
    case maxsat::Status::kOptimal: std::cout << "s OPTIMUM FOUND\n"; break;
    case maxsat::Status::kUnsatisfiable: std::cout << "s UNSATISFIABLE\n"; break;
    case maxsat::Status::kUnknown: std::cout << "s UNKNOWN\n"; break;
  }
  if (!res.starts.empty()) {
    std::cout << "v";
    for (int s : res.starts) std::cout << ' ' << s;
    std::cout << '\n';
    for (std::size_t k = 0; k < res.enforced.size(); ++k) {
      if (res.enforced[k]) continue;
      const auto& prec = inst.precedences[k];
      std::cout << "c dropped " << prec.from + 1 << ' ' << prec.to + 1 << ' ' << prec.lag << " weight "
                << p.weights[k] << '\n';
    }
  }
  return exit_for(r.status);
}

// --- bench ----------------------------------------------------------------------

struct BenchArgs {
  std::string dir;
  std::string algorithms = "all";
  std::string modes = "both";
  std::string alphas = "0.7,0.8,0.9";
  double timeout_s = 600.0;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string csv;
  bool deterministic = false;
  std::string bound = "exact";
};

int cmd_bench(const BenchArgs& args) {
  rcpsp::BenchConfig cfg;
  cfg.algorithms = algorithms_of(args.algorithms);
  cfg.modes = modes_of(args.modes);
  cfg.alphas.clear();
  for (const auto& a : split_list(args.alphas)) cfg.alphas.push_back(alpha_of(a));
  if (cfg.alphas.empty()) throw UsageError("no alpha given");
  cfg.timeout_s = args.timeout_s;
  cfg.seed = args.seed;
  cfg.jobs = args.jobs;
  cfg.deterministic_time = args.deterministic;
  cfg.bound = bound_of(args.bound);
  const auto instances = rcpsp::load_instances(args.dir);
  const auto rows = rcpsp::run_benchmark(instances, cfg);
  if (!args.csv.empty()) {
    std::ofstream out(args.csv, std::ios::binary);
    if (!out) throw UsageError("cannot write " + args.csv);
    out << rcpsp::to_csv(rows);
  }
  std::cout << rcpsp::format_table(rows, cfg);
  return kExitOk;
}

// --- verify ---------------------------------------------------------------------

struct VerifyArgs {
  std::string path;
  std::string core;
  std::string core_file;
  std::string result_file;
  std::optional<maxsat::Weight> optimum;
  std::optional<maxsat::Weight> below;
};

std::vector<int> parse_core_ids(const std::string& text, std::size_t clauses) {
  std::vector<int> ids;
  std::string tok;
  std::istringstream in(text);
  while (in >> tok) {
    for (const auto& item : split_list(tok)) {
      int id = 0;
      try {
        std::size_t used = 0;
        id = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw UsageError("malformed core id '" + item + "'");
      }
      if (id < 1 || static_cast<std::size_t>(id) > clauses) {
        throw UsageError("core id " + item + " outside 1.." + std::to_string(clauses));
      }
      ids.push_back(id - 1);
    }
  }
  return ids;
}

struct ClaimedResult {
  std::string status;
  std::vector<maxsat::Weight> objectives;
  std::optional<std::vector<bool>> model;
};

ClaimedResult parse_result(const std::string& text, int num_vars) {
  ClaimedResult c;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "s") {
      std::getline(ls >> std::ws, c.status);
    } else if (tag == "o") {
      maxsat::Weight z = 0;
      if (!(ls >> z)) throw UsageError("malformed objective line: " + line);
      c.objectives.push_back(z);
    } else if (tag == "v") {
      if (!c.model) c.model = std::vector<bool>(static_cast<std::size_t>(num_vars) + 1, false);
      int lit = 0;
      while (ls >> lit) {
        if (lit == 0) continue;
        if (std::abs(lit) > num_vars) throw UsageError("model literal out of range: " + std::to_string(lit));
        (*c.model)[std::abs(lit)] = lit > 0;
      }
    }
  }
  if (c.status.empty()) throw UsageError("result has no 's' line");
  return c;
}

int verdict(bool pass, const std::string& what) {
  std::cout << (pass ? "PASS " : "FAIL ") << what << '\n';
  return pass ? kExitOk : kExitUnknown;
}

int cmd_verify(const VerifyArgs& args) {
  const auto inst = maxsat::read_wcnf(args.path);
  const int given = (!args.core.empty() || !args.core_file.empty() ? 1 : 0) + (args.optimum ? 1 : 0) +
                    (args.result_file.empty() ? 0 : 1);
  if (given != 1) throw UsageError("give exactly one of --core/--core-file, --optimum, --result");
  if (args.below && args.core.empty() && args.core_file.empty()) throw UsageError("--below applies to cores only");

  if (!args.core.empty() || !args.core_file.empty()) {
    const std::string text = args.core.empty() ? read_file(args.core_file) : args.core;
    const auto ids = parse_core_ids(text, inst.clauses.size());
    if (args.below) {
      return verdict(oracle::verify_core_bounded(inst, ids, *args.below),
                     "core is unsatisfiable with cost below " + std::to_string(*args.below));
    }
    return verdict(oracle::verify_core(inst, ids), "core is unsatisfiable");
  }
  const auto truth = oracle::brute_force_maxsat(inst);
  const std::string actual = truth.optimum ? std::to_string(*truth.optimum) : "infeasible";
  if (args.optimum) {
    return verdict(truth.optimum == args.optimum,
                   "claimed optimum " + std::to_string(*args.optimum) + ", oracle " + actual);
  }
  const auto claim = parse_result(read_file(args.result_file), inst.num_vars);
  if (claim.status == "UNSATISFIABLE") return verdict(!truth.optimum, "unsatisfiable claim, oracle " + actual);
  if (claim.status == "OPTIMUM FOUND") {
    if (claim.objectives.empty() || !claim.model) return verdict(false, "optimum claim without 'o' and 'v' lines");
    const auto z = claim.objectives.back();
    const auto model_cost = maxsat::cost(inst, *claim.model);
    const std::string cost_text = model_cost ? std::to_string(*model_cost) : "hard violation";
    return verdict(truth.optimum == z && model_cost == z,
                   "claimed optimum " + std::to_string(z) + ", model cost " + cost_text + ", oracle " + actual);
  }
  if (claim.status == "UNKNOWN") {
    bool ok = true;
    for (auto z : claim.objectives) ok = ok && truth.optimum && z >= *truth.optimum;
    return verdict(ok, "objectives are upper bounds, oracle " + actual);
  }
  throw UsageError("unknown status '" + claim.status + "'");
}

// --- generate -------------------------------------------------------------------

struct GenerateArgs {
  std::uint64_t seed = 1;
  rcpsp::GeneratorConfig cfg;
  std::string output;
};

int cmd_generate(const GenerateArgs& args) {
  const auto inst = rcpsp::generate_instance(args.seed, args.cfg);
  const std::string text = "# generated with seed " + std::to_string(args.seed) + "\n" + rcpsp::serialize_instance(inst);
  if (args.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(args.output, std::ios::binary);
    if (!out) throw UsageError("cannot write " + args.output);
    out << text;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Core-guided and branch-and-bound MaxSAT over a lazy-clause-generation engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "softcore 0.1.0");

  SolveWcnfArgs wcnf;
  auto* solve_wcnf = app.add_subcommand("solve-wcnf", "Solve a weighted partial MaxSAT instance (WCNF)");
  solve_wcnf->add_option("file", wcnf.path, "WCNF file")->required();
  solve_wcnf->add_option("--algorithm", wcnf.algorithm, "bnb, wpm1 or msu3")->capture_default_str();
  solve_wcnf->add_option("--timeout-s", wcnf.timeout_s, "Wall-clock budget in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve_wcnf->add_option("--pb-encoding", wcnf.encoding, "Objective bound: propagator or counter")
      ->capture_default_str();

  SolveRcpspArgs rcp;
  auto* solve_rcpsp = app.add_subcommand("solve-rcpsp", "Maximise satisfied precedences under a makespan limit");
  solve_rcpsp->add_option("file", rcp.path, "Instance file")->required();
  solve_rcpsp->add_option("--algorithm", rcp.algorithm, "bnb, wpm1 or msu3")->capture_default_str();
  solve_rcpsp->add_option("--timeout-s", rcp.timeout_s, "Wall-clock budget in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve_rcpsp->add_option("--alpha", rcp.alpha, "Horizon factor in (0,1]")->capture_default_str();
  solve_rcpsp->add_option("--mode", rcp.mode, "cardinality or weighted")->capture_default_str();
  solve_rcpsp->add_option("--seed", rcp.seed, "Seed for weighted mode")->capture_default_str();
  solve_rcpsp->add_option("--bound", rcp.bound, "Source of l: exact or lower")->capture_default_str();
  solve_rcpsp->add_option("--lower-bound", rcp.lower_bound, "Use this l instead of computing one");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run the alpha x mode x algorithm grid over a directory");
  bench_cmd->add_option("dir", bench.dir, "Directory of .rcp files (subdirectories are sets)")->required();
  bench_cmd->add_option("--algorithm", bench.algorithms, "Comma list or 'all'")->capture_default_str();
  bench_cmd->add_option("--mode", bench.modes, "Comma list or 'both'")->capture_default_str();
  bench_cmd->add_option("--alpha", bench.alphas, "Comma list of horizon factors")->capture_default_str();
  bench_cmd->add_option("--timeout-s", bench.timeout_s, "Budget per cell in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Seed for weighted mode")->capture_default_str();
  bench_cmd->add_option("--jobs", bench.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--csv", bench.csv, "Write per-run rows to this path");
  bench_cmd->add_flag("--deterministic-time", bench.deterministic,
                      "Measure time in engine ticks (10000 per ms) for reproducible output");
  bench_cmd->add_option("--bound", bench.bound, "Source of l: exact or lower")->capture_default_str();

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check a core, an optimum or a solver result by enumeration");
  verify_cmd->add_option("file", verify.path, "WCNF file")->required();
  verify_cmd->add_option("--core", verify.core, "1-based clause ids, comma or space separated");
  verify_cmd->add_option("--core-file", verify.core_file, "File of 1-based clause ids");
  verify_cmd->add_option("--below", verify.below, "Verify the core under cost < this bound");
  verify_cmd->add_option("--optimum", verify.optimum, "Claimed optimum");
  verify_cmd->add_option("--result", verify.result_file, "Solver output with s/o/v lines");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Write a seeded random instance");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--tasks", gen.cfg.tasks, "Number of tasks")->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--resources", gen.cfg.resources, "Number of resources")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  gen_cmd->add_option("--max-duration", gen.cfg.max_duration, "Largest task duration")
      ->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--max-capacity", gen.cfg.max_capacity, "Largest resource capacity")
      ->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--edge-percent", gen.cfg.edge_percent, "Percent chance of a precedence per task pair")
      ->check(CLI::Range(0, 100))->capture_default_str();
  gen_cmd->add_option("--max-lag-percent", gen.cfg.max_lag_percent, "Percent chance of a matching maximum lag")
      ->check(CLI::Range(0, 100))->capture_default_str();
  gen_cmd->add_option("-o,--output", gen.output, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*solve_wcnf) return cmd_solve_wcnf(wcnf);
    if (*solve_rcpsp) return cmd_solve_rcpsp(rcp);
    if (*bench_cmd) return cmd_bench(bench);
    if (*verify_cmd) return cmd_verify(verify);
    if (*gen_cmd) return cmd_generate(gen);
  } catch (const oracle::Refused& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kExitRefused;
  } catch (const maxsat::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitError;
  } catch (const rcpsp::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
