#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "softcore/maxsat/drivers.hpp"
#include "softcore/oracle/oracle.hpp"
#include "softcore/rcpsp/rcpsp.hpp"

namespace py = pybind11;
using namespace softcore;

namespace {

maxsat::Algorithm algorithm_of(const std::string& name) {
  const auto a = maxsat::parse_algorithm(name);
  if (!a) throw py::value_error("unknown algorithm: " + name);
  return *a;
}

maxsat::DriverOptions options_of(std::optional<double> timeout_s, const std::string& pb_encoding) {
  maxsat::DriverOptions opts;
  opts.timeout_s = timeout_s;
  if (pb_encoding == "counter") {
    opts.pb_encoding = maxsat::PbEncoding::kCounter;
  } else if (pb_encoding != "propagator") {
    throw py::value_error("unknown pb encoding: " + pb_encoding);
  }
  return opts;
}

py::dict result_dict(const maxsat::OptimizeResult& r) {
  py::dict d;
  d["status"] = maxsat::to_string(r.status);
  d["z"] = r.z;
  d["incumbents"] = r.incumbents;
  py::list cores;
  for (const auto& c : r.cores) cores.append(c.ids);
  d["cores"] = cores;
  d["lower_bound"] = r.lower_bound;
  d["conflicts"] = r.stats.conflicts;
  d["ticks"] = r.stats.ticks;
  return d;
}

py::dict solve_wcnf(const std::string& text, const std::string& algorithm, std::optional<double> timeout_s,
                    const std::string& pb_encoding) {
  const auto inst = maxsat::parse_wcnf(text);
  maxsat::OptimizeResult r;
  {
    py::gil_scoped_release release;
    r = maxsat::solve(algorithm_of(algorithm), inst, options_of(timeout_s, pb_encoding));
  }
  auto d = result_dict(r);
  std::vector<int> model;
  if (r.status == maxsat::Status::kOptimal) {
    const auto a = maxsat::assignment(r, inst.num_vars);
    for (int v = 1; v <= inst.num_vars; ++v) model.push_back(a[v] ? v : -v);
  }
  d["model"] = model;
  return d;
}

py::dict solve_rcpsp(const std::string& text, const std::string& alpha, const std::string& mode,
                     const std::string& algorithm, std::uint64_t seed, std::optional<int> makespan,
                     std::optional<double> timeout_s) {
  const auto inst = rcpsp::parse_instance(text);
  const auto m = rcpsp::parse_mode(mode);
  if (!m) throw py::value_error("unknown mode: " + mode);
  const auto a = rcpsp::Fraction::parse(alpha);
  py::dict d;
  const auto l = makespan ? makespan : rcpsp::exact_makespan(inst);
  d["l"] = l;
  if (!l || a.floor_times(*l) < inst.max_duration()) {
    d["status"] = maxsat::to_string(maxsat::Status::kUnsatisfiable);
    d["z"] = py::none();
    d["starts"] = std::vector<int>{};
    return d;
  }
  const auto p = rcpsp::soften(inst, a, *l, *m, seed);
  rcpsp::ScheduleResult res;
  {
    py::gil_scoped_release release;
    res = rcpsp::solve_schedule(p, algorithm_of(algorithm), options_of(timeout_s, "propagator"));
  }
  d["status"] = maxsat::to_string(res.result.status);
  d["z"] = res.result.z;
  d["horizon"] = p.horizon;
  d["starts"] = res.starts;
  return d;
}

}  // namespace

PYBIND11_MODULE(_softcore, m) {
  m.doc() = "Core-guided MaxSAT and soft-precedence scheduling";
  py::register_exception<oracle::Refused>(m, "OracleRefused", PyExc_RuntimeError);
  py::register_exception<maxsat::ParseError>(m, "WcnfParseError", PyExc_ValueError);
  py::register_exception<rcpsp::ParseError>(m, "RcpspParseError", PyExc_ValueError);

  m.def("solve_wcnf", &solve_wcnf, py::arg("text"), py::arg("algorithm") = "msu3",
        py::arg("timeout_s") = py::none(), py::arg("pb_encoding") = "propagator");
  m.def(
      "brute_force_maxsat",
      [](const std::string& text) { return oracle::brute_force_maxsat(maxsat::parse_wcnf(text)).optimum; },
      py::arg("text"));
  m.def(
      "verify_core",
      [](const std::string& text, const std::vector<int>& ids, std::optional<maxsat::Weight> below) {
        const auto inst = maxsat::parse_wcnf(text);
        return below ? oracle::verify_core_bounded(inst, ids, *below) : oracle::verify_core(inst, ids);
      },
      py::arg("text"), py::arg("ids"), py::arg("below") = py::none());
  m.def("solve_rcpsp", &solve_rcpsp, py::arg("text"), py::arg("alpha") = "0.8", py::arg("mode") = "cardinality",
        py::arg("algorithm") = "msu3", py::arg("seed") = 1, py::arg("makespan") = py::none(),
        py::arg("timeout_s") = py::none());
  m.def(
      "exact_makespan", [](const std::string& text) { return rcpsp::exact_makespan(rcpsp::parse_instance(text)); },
      py::arg("text"));
  m.def(
      "makespan_lower_bound",
      [](const std::string& text) { return rcpsp::makespan_lower_bound(rcpsp::parse_instance(text)); },
      py::arg("text"));
  m.def("splitmix64", &rcpsp::splitmix64, py::arg("seed"), py::arg("k"));
}
