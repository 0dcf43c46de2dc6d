// Python bindings for the main operations.  Rationals cross the boundary as
// exact "p/q" strings; structured results come back as JSON-like dicts.

#include "maxvar/io.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace maxvar;

namespace {

StepFunction step_from_lists(const std::vector<std::string>& breakpoints,
                             const std::vector<std::string>& values) {
    std::vector<Rational> bps, vals;
    for (const auto& b : breakpoints) bps.push_back(rat_parse(b));
    for (const auto& v : values) vals.push_back(rat_parse(v));
    return make_step(std::move(bps), std::move(vals));
}

py::object json_to_py(const Json& j) {
    py::object loads = py::module_::import("json").attr("loads");
    return loads(j.dump());
}

std::vector<Rational> parse_points(const std::vector<std::string>& pts) {
    std::vector<Rational> out;
    for (const auto& p : pts) out.push_back(rat_parse(p));
    return out;
}

}  // namespace

PYBIND11_MODULE(_maxvar, m) {
    m.doc() = "exact Hardy-Littlewood maximal functions of rational step functions";

    py::register_exception<Error>(m, "MaxvarError");

    py::class_<StepFunction>(m, "StepFunction")
        .def(py::init(&step_from_lists), py::arg("breakpoints"), py::arg("values"))
        .def_property_readonly("breakpoints",
                               [](const StepFunction& f) {
                                   std::vector<std::string> out;
                                   for (const auto& b : f.breakpoints) out.push_back(rat_str(b));
                                   return out;
                               })
        .def_property_readonly("values",
                               [](const StepFunction& f) {
                                   std::vector<std::string> out;
                                   for (const auto& v : f.values) out.push_back(rat_str(v));
                                   return out;
                               })
        .def("__repr__", [](const StepFunction& f) {
            return "StepFunction(" + step_to_json(f).dump() + ")";
        });

    m.def("eval_point", [](const StepFunction& f, const std::string& x) {
        return rat_str(eval_point(f, rat_parse(x)));
    });
    m.def("average", [](const StepFunction& f, const std::string& a, const std::string& b) {
        return rat_str(average(f, rat_parse(a), rat_parse(b)));
    });
    m.def("variation", [](const StepFunction& f) { return rat_str(variation(f)); });

    m.def("centered_max", [](const StepFunction& f, const std::string& x) {
        return json_to_py(maxeval_to_json(centered_max(f, rat_parse(x))));
    });
    m.def("noncentered_max", [](const StepFunction& f, const std::string& x) {
        return json_to_py(maxeval_to_json(noncentered_max(f, rat_parse(x))));
    });
    m.def("truncated_max",
          [](const StepFunction& f, const std::string& x, const std::string& r) {
              return json_to_py(maxeval_to_json(truncated_max(f, rat_parse(x), rat_parse(r))));
          });
    m.def("local_max", [](const StepFunction& f, const std::string& x, const std::string& d) {
        return json_to_py(maxeval_to_json(local_max(f, rat_parse(x), rat_parse(d))));
    });
    m.def("omega_max", [](const StepFunction& f, const std::string& x, const std::string& mv) {
        return rat_str(omega_max(f, rat_parse(x), rat_parse(mv)));
    });

    m.def("variation_enclosure",
          [](const StepFunction& f, const std::string& op, const std::string& eps) {
              Envelope env = op == "noncentered" ? noncentered_envelope(f) : centered_envelope(f);
              VariationEnclosure enc = variation_enclosure(env, rat_parse(eps));
              return py::make_tuple(rat_str(enc.lo), rat_str(enc.hi));
          },
          py::arg("f"), py::arg("op") = "centered", py::arg("eps") = "1/1000");

    m.def("theorem_trace",
          [](const StepFunction& f, const std::vector<std::string>& points) {
              std::vector<Rational> pts =
                  points.empty() ? default_trace_points(f) : parse_points(points);
              return json_to_py(report_to_json(theorem_trace(f, pts)));
          },
          py::arg("f"), py::arg("points") = std::vector<std::string>{});

    m.def("search_ratio",
          [](std::uint64_t seed, int iterations, const std::string& mode, int max_pieces,
             int value_den, int break_den, const std::string& eps) {
              SearchConfig cfg;
              cfg.seed = seed;
              cfg.iterations = iterations;
              cfg.max_pieces = max_pieces;
              cfg.value_den = value_den;
              cfg.break_den = break_den;
              cfg.eps = rat_parse(eps);
              if (mode == "random")
                  cfg.mode = SearchConfig::Mode::Random;
              else if (mode == "exhaustive-discrete")
                  cfg.mode = SearchConfig::Mode::ExhaustiveDiscrete;
              else
                  cfg.mode = SearchConfig::Mode::Anneal;
              return json_to_py(search_result_to_json(search_ratio(cfg)));
          },
          py::arg("seed") = 42, py::arg("iterations") = 100, py::arg("mode") = "anneal",
          py::arg("max_pieces") = 6, py::arg("value_den") = 8, py::arg("break_den") = 8,
          py::arg("eps") = "1/1000");

    m.def("discrete_max", [](const py::dict& signal) {
        Json j = parse_json_text(py::str(py::module_::import("json").attr("dumps")(signal)));
        DiscreteSignal s = signal_from_json(j);
        Json out;
        out["max"] = signal_to_json(discrete_max(s));
        out["var_signal"] = rat_str(discrete_variation(s));
        out["var_max"] = rat_str(discrete_variation(discrete_max(s)));
        return json_to_py(out);
    });

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
