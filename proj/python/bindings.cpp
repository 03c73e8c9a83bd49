#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "csplab/counting.hpp"
#include "csplab/error.hpp"
#include "csplab/experiments.hpp"
#include "csplab/io.hpp"
#include "csplab/predicate_analysis.hpp"
#include "csplab/sampler.hpp"

namespace py = pybind11;
using namespace csplab;

namespace {

// Results cross the boundary as JSON text; the Python wrapper decodes them.
std::string dump(const nlohmann::json& j) { return j.dump(); }

PlantMode parse_plant(const std::string& mode) {
  if (mode == "random") return PlantMode::kRandom;
  if (mode == "fixed") return PlantMode::kFixed;
  if (mode == "unplanted") return PlantMode::kUnplanted;
  throw Error(ErrorKind::kInvalidArgument, "unknown plant mode '" + mode + "'");
}

Scheme parse_scheme(const std::string& scheme) {
  if (scheme == "binomial") return Scheme::kBinomial;
  if (scheme == "uniform") return Scheme::kUniform;
  throw Error(ErrorKind::kInvalidArgument, "unknown scheme '" + scheme + "'");
}

ModelSpec make_spec(const std::string& family, std::size_t n, double alpha, int k,
                    const std::optional<std::string>& predicate, const std::string& plant_mode,
                    const std::optional<std::string>& plant, const std::string& scheme) {
  ModelSpec s;
  s.family = parse_family(family);
  s.n = n;
  s.k = k;
  s.alpha = alpha;
  s.plant_mode = parse_plant(plant_mode);
  s.scheme = parse_scheme(scheme);
  if (predicate) s.predicate = std::make_shared<const Predicate>(Predicate::from_hex(k, *predicate));
  if (plant) s.fixed_plant = Assignment::from_string(*plant);
  validate_spec(s);
  return s;
}

#define SPEC_ARGS                                                                                    \
  py::arg("family"), py::arg("n"), py::arg("alpha"), py::arg("k") = 3, py::arg("predicate") = py::none(), \
      py::arg("plant_mode") = "random", py::arg("plant") = py::none(), py::arg("scheme") = "binomial"

ExperimentOptions options(int jobs) {
  ExperimentOptions o;
  o.jobs = jobs;
  return o;
}

}  // namespace

PYBIND11_MODULE(_csplab, m) {
  m.doc() = "Planted random CSP sampling, exact counting and predicate analysis";

  static py::exception<Error> error(m, "CsplabError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error((std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  m.def(
      "sample",
      [](const std::string& family, std::size_t n, double alpha, int k, std::optional<std::string> predicate,
         const std::string& plant_mode, std::optional<std::string> plant, const std::string& scheme, Seed seed) {
        return dump(to_json(sample(make_spec(family, n, alpha, k, predicate, plant_mode, plant, scheme), seed)));
      },
      SPEC_ARGS, py::arg("seed") = 0);

  m.def(
      "count",
      [](const std::string& family, std::size_t n, double alpha, int k, std::optional<std::string> predicate,
         const std::string& plant_mode, std::optional<std::string> plant, const std::string& scheme, Seed seed,
         std::optional<std::string> method) {
        const Formula f = sample(make_spec(family, n, alpha, k, predicate, plant_mode, plant, scheme), seed);
        if (!method) return dump(to_json(count_auto(f)));
        const std::string& name = *method;
        CountMethod cm = CountMethod::kComponents;
        if (name == "brute") cm = CountMethod::kBrute;
        else if (name == "gf2") cm = CountMethod::kGf2;
        else if (name == "preimage") cm = CountMethod::kPreimage;
        else if (name != "components") throw Error(ErrorKind::kInvalidArgument, "unknown method '" + name + "'");
        return dump(to_json(count_with(f, cm)));
      },
      SPEC_ARGS, py::arg("seed") = 0, py::arg("method") = py::none());

  m.def(
      "export_dimacs",
      [](const std::string& family, std::size_t n, double alpha, int k, std::optional<std::string> predicate,
         const std::string& plant_mode, std::optional<std::string> plant, const std::string& scheme, Seed seed,
         bool xor_dialect) {
        return export_dimacs(sample(make_spec(family, n, alpha, k, predicate, plant_mode, plant, scheme), seed),
                             xor_dialect);
      },
      SPEC_ARGS, py::arg("seed") = 0, py::arg("xor_dialect") = false);

  m.def(
      "count_dimacs", [](const std::string& text) { return dump(to_json(count_auto(parse_dimacs(text)))); },
      py::arg("text"));

  m.def(
      "estimate_psi",
      [](const std::string& family, std::size_t n, double alpha, int k, std::optional<std::string> predicate,
         const std::string& plant_mode, std::optional<std::string> plant, const std::string& scheme,
         std::size_t samples, Seed seed, int jobs) {
        const ModelSpec s = make_spec(family, n, alpha, k, predicate, plant_mode, plant, scheme);
        py::gil_scoped_release release;
        return dump(to_json(estimate_psi(s, samples, seed, options(jobs))));
      },
      SPEC_ARGS, py::arg("samples") = 100, py::arg("seed") = 0, py::arg("jobs") = 1);

  m.def(
      "estimate_qn",
      [](const std::string& family, std::size_t n, double alpha, int k, std::optional<std::string> predicate,
         const std::string& plant_mode, std::optional<std::string> plant, const std::string& scheme, double phi,
         std::size_t samples, Seed seed, int jobs) {
        const ModelSpec s = make_spec(family, n, alpha, k, predicate, plant_mode, plant, scheme);
        py::gil_scoped_release release;
        return dump(to_json(estimate_qn(s, phi, samples, seed, options(jobs))));
      },
      SPEC_ARGS, py::arg("phi") = 0.5, py::arg("samples") = 200, py::arg("seed") = 0, py::arg("jobs") = 1);

  m.def(
      "locate_threshold",
      [](const std::string& family, std::size_t n, int k, std::optional<std::string> predicate, double alpha_max,
         double phi, double tolerance, std::size_t samples, Seed seed, int jobs) {
        const ModelSpec s = make_spec(family, n, 0.0, k, predicate, "random", std::nullopt, "binomial");
        py::gil_scoped_release release;
        return dump(to_json(locate_threshold(s, phi, tolerance, samples, seed, alpha_max, options(jobs))));
      },
      py::arg("family"), py::arg("n"), py::arg("k") = 3, py::arg("predicate") = py::none(),
      py::arg("alpha_max"), py::arg("phi") = 0.5, py::arg("tolerance") = 0.01, py::arg("samples") = 200,
      py::arg("seed") = 0, py::arg("jobs") = 1);

  m.def(
      "gamma",
      [](const std::string& predicate, int k, int ell, std::vector<double> weights) {
        return gamma_ell(Predicate::from_hex(k, predicate), ell, TupleMeasure(ell, std::move(weights)));
      },
      py::arg("predicate"), py::arg("k"), py::arg("ell"), py::arg("weights"));

  m.def(
      "scan_predicates",
      [](int k, int lmax, std::size_t pairs, std::size_t hessian_points, Seed seed, int jobs) {
        py::gil_scoped_release release;
        return dump(to_json(scan_predicates(k, lmax, SearchBudget{pairs, hessian_points}, seed, jobs)));
      },
      py::arg("k"), py::arg("lmax") = 3, py::arg("pairs") = 20000, py::arg("hessian_points") = 200,
      py::arg("seed") = 0, py::arg("jobs") = 1);

  m.def(
      "azuma_check",
      [](std::size_t n, int k, const std::string& predicate, std::size_t trials, Seed seed) {
        const auto chi = std::make_shared<const Predicate>(Predicate::from_hex(k, predicate));
        py::gil_scoped_release release;
        return dump(to_json(azuma_increment_check(n, k, chi, trials, seed)));
      },
      py::arg("n"), py::arg("k"), py::arg("predicate"), py::arg("trials") = 200, py::arg("seed") = 0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
