#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dform/app.hpp"

namespace py = pybind11;
using namespace dform;
using nlohmann::json;

namespace {

Mode mode_arg(const std::string& m) { return mode_from_name(m); }

py::array_t<double> grid_values(const ScalarField& f) {
    const Grid2& g = f.grid();
    py::array_t<double> out({g.nx(), g.ny()});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < g.nx(); ++i) {
        for (std::size_t j = 0; j < g.ny(); ++j) w(i, j) = f.at(i, j);
    }
    return out;
}

Object make_object(const std::string& kind, const std::vector<std::string>& comps, std::pair<double, double> xrange,
            std::optional<std::pair<double, double>> yrange, std::size_t n) {
    const auto yr = yrange.value_or(xrange);
    return make_field(kind_from_name(kind), Grid2({xrange.first, xrange.second, n}, {yr.first, yr.second, n}),
                      [&] {
                          std::vector<ComponentSpec> specs;
                          for (const auto& c : comps) specs.push_back({c, std::nullopt});
                          return specs;
                      }());
}

ZoomSpec zoom_spec(std::pair<double, double> target, double mag, std::size_t dpd, double insize) {
    ZoomSpec z;
    z.target_x = target.first;
    z.target_y = target.second;
    z.mag = mag;
    z.dpd = dpd;
    z.insize = insize;
    return z;
}

PlotStyle style_arg(const std::string& style_json) {
    return style_json.empty() ? PlotStyle{} : style_from_json(json::parse(style_json));
}

/// Opaque holder: pybind11's variant caster would otherwise unpack Object.
struct Handle {
    Object obj;
};

}  // namespace

PYBIND11_MODULE(_dform, m) {
    m.doc() = "Differential forms on the plane";
    m.attr("__version__") = kVersion;

    // Translators run newest first, so the base class goes in first.
    const auto& error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<KindError>(m, "KindError", error.ptr());
    py::register_exception<ParseError>(m, "ParseError", error.ptr());

    m.def("parse", [](const std::string& s) { return to_string(parse(s)); }, "Canonical text of an equation");
    m.def("parse_offset", [](const std::string& s) -> std::optional<std::size_t> {
        try {
            parse(s);
        } catch (const ParseError& e) {
            return e.offset();
        }
        return std::nullopt;
    }, "Offset of the first grammar error, None when the equation parses");
    m.def("differentiate", [](const std::string& s, const std::string& var) {
        if (var != "x" && var != "y") throw Error("variable must be x or y");
        return to_string(differentiate(parse(s), var == "x" ? Var::X : Var::Y));
    });
    m.def("evaluate", [](const std::string& s, double x, double y) { return parse(s).evaluate(x, y); });

    py::class_<Handle>(m, "Object")
        .def_property_readonly("kind", [](const Handle& h) { return std::string(name_of(kind_of(h.obj))); })
        .def_property_readonly("shape", [](const Handle& h) {
            return std::pair{grid_of(h.obj).nx(), grid_of(h.obj).ny()};
        })
        .def_property_readonly("exprs", [](const Handle& h) {
            std::vector<std::optional<std::string>> out;
            for (const auto* c : components(h.obj)) out.push_back(c->expr() ? std::optional(to_string(*c->expr())) : std::nullopt);
            return out;
        })
        .def_property_readonly("values", [](const Handle& h) {
            std::vector<py::array_t<double>> out;
            for (const auto* c : components(h.obj)) out.push_back(grid_values(*c));
            return out;
        }, "Component arrays indexed [i, j] with x along i")
        .def("ext_d", [](const Handle& h, const std::string& mode) { return Handle{ext_d(h.obj, mode_arg(mode))}; },
             py::arg("mode") = "auto")
        .def("interior_d", [](const Handle& h, const std::string& vx, const std::string& vy, const std::string& mode) {
            return Handle{interior_d(h.obj, vx, vy, mode_arg(mode))};
        }, py::arg("vx") = "1", py::arg("vy") = "1", py::arg("mode") = "auto")
        .def("hodge", [](const Handle& h, const std::string& mode) { return Handle{hodge(h.obj, mode_arg(mode))}; },
             py::arg("mode") = "auto")
        .def("wedge", [](const Handle& a, const Handle& b, const std::string& mode) { return Handle{wedge(a.obj, b.obj, mode_arg(mode))}; },
             py::arg("other"), py::arg("mode") = "auto")
        .def("covariant", [](const Handle& h, std::optional<std::vector<std::string>> g) {
            if (kind_of(h.obj) != Kind::VectorField) throw KindError("covariant applies to vector fields");
            const Metric m = g ? Metric::from_strings(g->at(0), g->at(1), g->at(2), g->at(3)) : Metric::identity();
            return Handle{Object(covariant(std::get<VectorField>(h.obj), m))};
        }, py::arg("metric") = std::nullopt)
        .def("contravariant", [](const Handle& h, std::optional<std::vector<std::string>> g) {
            if (kind_of(h.obj) != Kind::Form1) throw KindError("contravariant applies to 1-forms");
            const Metric m = g ? Metric::from_strings(g->at(0), g->at(1), g->at(2), g->at(3)) : Metric::identity();
            return Handle{Object(contravariant(std::get<Form1>(h.obj), m))};
        }, py::arg("metric") = std::nullopt)
        .def("scale", [](const Handle& h, double c) { return Handle{scale(c, h.obj)}; })
        .def("__add__", [](const Handle& a, const Handle& b) { return Handle{add(a.obj, b.obj)}; })
        .def("log_scale", [](const Handle& h) { return Handle{log_scale(h.obj)}; })
        .def("set_density", [](const Handle& h, std::size_t n) { return Handle{set_density(h.obj, n)}; })
        .def("zoom", [](const Handle& h, std::pair<double, double> target, double mag, std::size_t dpd, double insize) {
            return Handle{zoom(h.obj, zoom_spec(target, mag, dpd, insize)).object};
        }, py::arg("target"), py::arg("mag") = 2.0, py::arg("dpd") = 9, py::arg("insize") = 0.3)
        .def("apply", [](const Handle& h, const std::string& op_json) { return Handle{apply_op(h.obj, json::parse(op_json))}; },
             "Apply one op descriptor given as JSON text")
        .def("to_json", [](const Handle& h) { return object_to_json(h.obj).dump(); })
        .def("scene_json", [](const Handle& h, const std::string& style) {
            return to_json(scene_of(h.obj, style_arg(style))).dump();
        }, py::arg("style") = "")
        .def("svg", [](const Handle& h, const std::string& style) { return render_svg(scene_of(h.obj, style_arg(style))); },
             py::arg("style") = "");

    m.def("make", [](const std::string& kind, const std::vector<std::string>& comps, std::pair<double, double> xr,
                     std::optional<std::pair<double, double>> yr,
                     std::size_t n) { return Handle{make_object(kind, comps, xr, yr, n)}; },
          py::arg("kind"), py::arg("comps"), py::arg("xrange") = std::pair{-5.0, 5.0},
          py::arg("yrange") = std::nullopt, py::arg("n") = 31);
    m.def("from_json", [](const std::string& j) { return Handle{object_from_json(json::parse(j))}; });
    m.def("typecheck", [](const std::string& kind, const std::string& chain_json) {
        std::vector<std::string> out;
        for (Kind k : typecheck(kind_from_name(kind), json::parse(chain_json))) out.emplace_back(name_of(k));
        return out;
    });
    m.def("run_job", [](const std::string& job_json, const std::string& format) {
        const JobSpec job = JobSpec::from_json(json::parse(job_json));
        return render_output(run_job(job), format_from_name(format));
    }, py::arg("job"), py::arg("format") = "scene-json", "Run a JobSpec given as JSON text");
}
