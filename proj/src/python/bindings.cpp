#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "implquad/bench.hpp"
#include "implquad/binning.hpp"
#include "implquad/cli.hpp"
#include "implquad/error.hpp"
#include "implquad/fatigue.hpp"
#include "implquad/ingest.hpp"
#include "implquad/quadrature.hpp"
#include "implquad/rainflow.hpp"
#include "implquad/seedbalance.hpp"
#include "implquad/serialize.hpp"
#include "implquad/synth.hpp"

namespace py = pybind11;
using namespace implquad;

namespace {

py::dict moments_dict(const MomentCheck& c) {
  py::dict d;
  d["orthonormal"] = c.orthonormal;
  d["monomial"] = c.monomial;
  d["weight_sum_error"] = c.weight_sum_error;
  d["min_weight"] = c.min_weight;
  return d;
}

py::dict allocation_dict(const SeedAllocation& a) {
  py::dict d;
  d["seeds"] = a.seeds;
  d["continuous_error"] = a.continuous_error;
  d["accuracy_goal"] = a.accuracy_goal;
  d["scaling_constant"] = a.scaling_constant;
  d["total"] = a.total;
  d["budget_slack"] = a.budget_slack;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Positive-weight quadrature rules built from sample data, and fatigue load aggregation.";

  static py::object error_type = py::exception<Error>(m, "ImplquadError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object instance = error_type(e.what());
      instance.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), instance.ptr());
    }
  });

  py::class_<SampleSet>(m, "SampleSet")
      .def(py::init([](const Eigen::MatrixXd& points, std::vector<std::string> names) {
             const std::string hash = fingerprint(points, names);
             return SampleSet(points, std::move(names), hash);
           }),
           py::arg("points"), py::arg("column_names"))
      .def_property_readonly("raw", &SampleSet::raw)
      .def_property_readonly("scaled", &SampleSet::scaled)
      .def_property_readonly("column_names", &SampleSet::column_names)
      .def_property_readonly("source_hash", &SampleSet::source_hash)
      .def("__len__", &SampleSet::size)
      .def_property_readonly("dimension", &SampleSet::dimension);

  m.def("load_samples", [](const std::string& path, const std::vector<std::string>& columns) {
    return load_samples(path, columns);
  }, py::arg("path"), py::arg("columns"));
  m.def("synthesize", [](std::size_t rows, std::size_t dimension, std::uint64_t seed) {
    SynthOptions o;
    o.rows = rows;
    o.dimension = dimension;
    o.seed = seed;
    return synthesize_environment(o);
  }, py::arg("rows") = 5000, py::arg("dimension") = 5, py::arg("seed") = 1);

  py::class_<QuadratureRule>(m, "QuadratureRule")
      .def_readonly("node_indices", &QuadratureRule::node_indices)
      .def_readonly("weights", &QuadratureRule::weights)
      .def_readonly("source_hash", &QuadratureRule::source_hash)
      .def_readonly("rng_seed", &QuadratureRule::rng_seed)
      .def_readonly("deterministic", &QuadratureRule::deterministic)
      .def_property_readonly("basis_count", [](const QuadratureRule& r) { return r.basis.count; })
      .def_property_readonly("degree", &QuadratureRule::degree)
      .def("__len__", &QuadratureRule::size);

  m.def("construct_implicit_rule", [](const SampleSet& s, std::size_t nodes, std::uint64_t seed, bool deterministic) {
    return construct_implicit_rule(s, nodes, {seed, deterministic});
  }, py::arg("samples"), py::arg("nodes"), py::arg("seed") = 0, py::arg("deterministic") = false);
  m.def("build_sequence", [](const QuadratureRule& r, const SampleSet& s, std::uint64_t seed) {
    return build_sequence(r, s, seed).rules;
  }, py::arg("rule"), py::arg("samples"), py::arg("seed"));
  m.def("check_moments", [](const QuadratureRule& r, const SampleSet& s) { return moments_dict(check_moments(r, s)); },
        py::arg("rule"), py::arg("samples"));
  m.def("rule_to_json", [](const QuadratureRule& r, const SampleSet& s) { return dump(rule_to_json(r, s)); },
        py::arg("rule"), py::arg("samples"));

  m.def("bin_samples", [](const SampleSet& s, const std::vector<double>& widths, const std::vector<double>& anchors) {
    if (!anchors.empty() && anchors.size() != widths.size()) throw Error(ErrorKind::Argument, "one anchor per width");
    std::vector<BinAxis> axes;
    for (std::size_t i = 0; i < widths.size(); ++i) {
      BinAxis a;
      a.width = widths[i];
      if (!anchors.empty()) a.anchor = anchors[i];
      axes.push_back(a);
    }
    const BinGrid g = bin_samples(s, axes);
    py::dict d;
    d["centers"] = g.centers;
    d["cells"] = g.cells;
    d["counts"] = g.counts;
    std::vector<double> w;
    for (std::size_t c = 0; c < g.occupied(); ++c) w.push_back(g.weight(c));
    d["weights"] = w;
    return d;
  }, py::arg("samples"), py::arg("widths"), py::arg("anchors") = std::vector<double>{});

  m.def("balance_seeds", [](const std::vector<double>& w, double goal, const std::vector<double>& var) {
    return allocation_dict(balance_seeds(w, goal, var));
  }, py::arg("weights"), py::arg("accuracy_goal"), py::arg("variance") = std::vector<double>{});
  m.def("uniform_seeds", [](std::size_t n, unsigned s) { return allocation_dict(uniform_seeds(n, s)); },
        py::arg("node_count"), py::arg("seeds_per_node"));

  m.def("rainflow", [](const std::vector<double>& series) {
    std::vector<std::tuple<double, double, double>> out;
    for (const auto& c : rainflow_count(series)) out.emplace_back(c.range, c.mean, c.count);
    return out;
  }, py::arg("series"), "Cycles as (range, mean, count) tuples.");
  m.def("equivalent_load", [](const std::vector<double>& series, double slope, std::optional<double> n_ref) {
    return equivalent_load(rainflow_count(series), slope, n_ref);
  }, py::arg("series"), py::arg("m"), py::arg("n_ref") = py::none());
  m.def("aggregate", &aggregate, py::arg("loads"), py::arg("weights"), py::arg("m"));
  m.def("sigma1", [](double v, double i_ref) { return derive_turbulence(v, i_ref, false).sigma1; }, py::arg("v_hub"),
        py::arg("i_ref") = kReferenceTurbulence);
  m.def("misalignment", &misalignment, py::arg("theta_wind"), py::arg("theta_wave"));

  m.def("run_genz", [](const SampleSet& s, const std::vector<long>& bins, std::size_t repetitions, std::uint64_t seed,
                       const std::vector<std::string>& families) {
    GenzOptions o;
    o.bin_counts = bins;
    o.repetitions = repetitions;
    o.seed = seed;
    if (!families.empty()) {
      o.families.clear();
      for (const auto& f : families) o.families.push_back(family_from_name(f));
    }
    py::list rows;
    for (const auto& r : run_genz_experiment(s, o).rows) {
      py::dict d;
      d["family"] = std::string(family_name(r.family));
      d["B"] = r.bins;
      d["N"] = r.nodes;
      d["method"] = r.method;
      d["mean_error"] = r.mean_error;
      rows.append(d);
    }
    return rows;
  }, py::arg("samples"), py::arg("bins") = std::vector<long>{1, 2, 3, 4, 5}, py::arg("repetitions") = 20,
     py::arg("seed") = 1, py::arg("families") = std::vector<std::string>{});

  m.def("cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs one command line; returns (exit_code, stdout, stderr).");
}
