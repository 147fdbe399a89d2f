#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "merge_metrics/coupling.hpp"
#include "merge_metrics/dual_metrics.hpp"
#include "merge_metrics/errors.hpp"
#include "merge_metrics/func_kit.hpp"
#include "merge_metrics/io.hpp"
#include "merge_metrics/merging_lab.hpp"
#include "merge_metrics/prokhorov.hpp"
#include "merge_metrics/selftest.hpp"

namespace py = pybind11;
namespace mm = merge_metrics;
using mm::io::json;

namespace {

// Python-side handle; SpacePtr points to const, which pybind11 holders reject.
struct Space {
  mm::SpacePtr ptr;
};

py::object to_python(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_python(const py::object& o) { return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Compiled core of merge_metrics.";

  // Deliberately leaked so it outlives interpreter teardown.
  static py::handle error_type = py::exception<mm::Error>(m, "MergeMetricsError", PyExc_ValueError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const mm::Error& e) {
      py::object cls = py::reinterpret_borrow<py::object>(error_type);
      py::object err = cls(e.what());
      err.attr("kind") = e.kind();
      PyErr_SetObject(cls.ptr(), err.ptr());
    }
  });

  py::class_<Space>(m, "Space")
      .def_static(
          "euclidean",
          [](mm::Coordinates pts) {
            return Space{mm::make_space(mm::MetricSpace::from_coordinates(std::move(pts), mm::MetricKind::Euclidean))};
          },
          py::arg("points"))
      .def_static(
          "l1",
          [](mm::Coordinates pts) {
            return Space{mm::make_space(mm::MetricSpace::from_coordinates(std::move(pts), mm::MetricKind::L1))};
          },
          py::arg("points"))
      .def_static(
          "matrix",
          [](const std::vector<std::vector<double>>& d) { return Space{mm::make_space(mm::MetricSpace::from_matrix(d))}; },
          py::arg("distances"))
      .def_static(
          "discrete", [](std::size_t n) { return Space{mm::make_space(mm::MetricSpace::discrete(n))}; }, py::arg("n"))
      .def_static(
          "from_dict", [](const py::object& d) { return Space{mm::io::space_from_json(from_python(d))}; },
          py::arg("doc"))
      .def("to_dict", [](const Space& s) { return to_python(mm::io::space_to_json(*s.ptr)); })
      .def("dist", [](const Space& s, std::size_t i, std::size_t j) { return s.ptr->dist(i, j); })
      .def("__len__", [](const Space& s) { return s.ptr->size(); });

  py::class_<mm::DiscreteMeasure>(m, "Measure")
      .def(py::init([](const Space& s, std::vector<double> w) { return mm::discrete_measure(s.ptr, std::move(w)); }),
           py::arg("space"), py::arg("weights"))
      .def_static("point_mass", [](const Space& s, std::size_t i) { return mm::point_mass(s.ptr, i); })
      .def_static(
          "empirical",
          [](const mm::Coordinates& samples, const std::string& metric) {
            return mm::empirical(samples, mm::metric_kind_from_string(metric));
          },
          py::arg("samples"), py::arg("metric") = "euclidean")
      .def_static(
          "from_dict", [](const py::object& d) { return mm::io::measure_from_json(from_python(d)); }, py::arg("doc"))
      .def("to_dict", [](const mm::DiscreteMeasure& p) { return to_python(mm::io::measure_to_json(p)); })
      .def_property_readonly("weights", &mm::DiscreteMeasure::weights)
      .def_property_readonly("space", [](const mm::DiscreteMeasure& p) { return Space{p.space()}; })
      .def("__len__", &mm::DiscreteMeasure::size);

  m.def(
      "prokhorov",
      [](const mm::DiscreteMeasure& p, const mm::DiscreteMeasure& q, const std::string& method) {
        if (method != "scan" && method != "bisection") throw mm::Error("InvalidArgument", "method must be scan or bisection");
        return to_python(mm::io::to_json(mm::prokhorov_distance(
            p, q, method == "scan" ? mm::ProkhorovMethod::BreakpointScan : mm::ProkhorovMethod::Bisection)));
      },
      py::arg("p"), py::arg("q"), py::arg("method") = "scan", "Levy-Prokhorov distance {pi, breakpoint, transported_mass}.");
  m.def(
      "beta", [](const mm::DiscreteMeasure& p, const mm::DiscreteMeasure& q) {
        return to_python(mm::io::to_json(mm::beta_distance(p, q)));
      },
      py::arg("p"), py::arg("q"), "Bounded-Lipschitz distance with witness.");
  m.def(
      "class_sup",
      [](const mm::DiscreteMeasure& p, const mm::DiscreteMeasure& q, const std::string& cls) {
        return to_python(mm::io::to_json(mm::class_sup(p, q, mm::FunctionClassSpec::parse(cls))));
      },
      py::arg("p"), py::arg("q"), py::arg("cls"), "sup over F1, Feps:<eps> or BL.");
  m.def(
      "omega_sup",
      [](const mm::DiscreteMeasure& p, const mm::DiscreteMeasure& q, const py::object& modulus, double bound) {
        return to_python(mm::io::to_json(mm::omega_sup(p, q, mm::io::modulus_from_json(from_python(modulus)), bound)));
      },
      py::arg("p"), py::arg("q"), py::arg("modulus"), py::arg("bound") = 1.0,
      "sup over |f| <= bound with modulus dominated by {'knots': [[h, w], ...], 'tail': ...}.");
  m.def(
      "couple", [](const mm::DiscreteMeasure& p, const mm::DiscreteMeasure& q) {
        return to_python(mm::io::to_json(mm::optimal_coupling(p, q)));
      },
      py::arg("p"), py::arg("q"), "Optimal coupling {alpha, joint}.");
  m.def(
      "pushforward",
      [](const mm::DiscreteMeasure& p, std::vector<double> values) {
        return mm::pushforward(p, mm::FunctionOnSpace::tabulated(p.space(), std::move(values)));
      },
      py::arg("p"), py::arg("values"), "Image measure under the function tabulated by `values`.");
  m.def("scenario_names", &mm::scenario_names);
  m.def(
      "run_scenario",
      [](const std::string& name, std::vector<std::size_t> indices, std::vector<std::string> metrics,
         std::vector<double> thresholds, std::size_t window, std::uint64_t seed, std::size_t samples,
         const std::string& law_f, const std::string& law_g, const std::string& form, const std::string& delta_rule) {
        mm::ScenarioOptions opt;
        opt.indices = std::move(indices);
        opt.seed = seed;
        opt.sample_size = samples;
        opt.law_f = law_f;
        opt.law_g = law_g;
        opt.form = form;
        opt.delta_rule = delta_rule;
        const auto sc = mm::make_scenario(name, opt);
        mm::DiagnoseConfig cfg;
        cfg.metrics = std::move(metrics);
        cfg.thresholds = std::move(thresholds);
        cfg.window = window;
        mm::MergingReport rep;
        {
          py::gil_scoped_release release;
          rep = mm::diagnose(sc, sc.indices(), cfg);
        }
        return to_python(mm::io::to_json(rep));
      },
      py::arg("name"), py::arg("indices") = std::vector<std::size_t>{}, py::arg("metrics") = std::vector<std::string>{},
      py::arg("thresholds") = std::vector<double>{0.05}, py::arg("window") = 5, py::arg("seed") = 42,
      py::arg("samples") = 20000, py::arg("law_f") = "gaussian", py::arg("law_g") = "rademacher",
      py::arg("form") = "chain", py::arg("delta_rule") = "inverse", "Diagnose a built-in scenario; returns the report.");
  m.def(
      "selftest",
      [](std::uint64_t seed, std::size_t cases) {
        const auto r = mm::run_selftest(seed, cases);
        py::list suites;
        for (const auto& s : r.suites) {
          py::dict d;
          d["name"] = s.name;
          d["cases"] = s.cases;
          d["failures"] = s.failures;
          d["detail"] = s.detail;
          suites.append(d);
        }
        py::dict out;
        out["seed"] = r.seed;
        out["passed"] = r.passed();
        out["suites"] = suites;
        return out;
      },
      py::arg("seed") = 1, py::arg("cases") = 200);
}
