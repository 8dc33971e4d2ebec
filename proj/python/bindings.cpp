#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cylflow/acceptance.hpp"
#include "cylflow/config.hpp"
#include "cylflow/error.hpp"
#include "cylflow/hermite.hpp"
#include "cylflow/mode_dynamics.hpp"
#include "cylflow/normal_form.hpp"
#include "cylflow/ou_semigroup.hpp"
#include "cylflow/rotational.hpp"
#include "cylflow/scenarios.hpp"
#include "cylflow/shrinker.hpp"

#include <sstream>

namespace py = pybind11;
using namespace cylflow;

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Rescaled mean curvature flow near cylinders";

    static py::exception<Error> exc(m, "CylflowError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            // args = (name, message) so callers can branch on the stable name
            PyErr_SetObject(exc.ptr(), py::make_tuple(e.name(), e.what()).ptr());
        }
    });

    py::class_<ShrinkerSpec>(m, "ShrinkerSpec")
        .def_readonly("n", &ShrinkerSpec::n)
        .def_readonly("k", &ShrinkerSpec::k)
        .def_readonly("rho", &ShrinkerSpec::rho)
        .def("__repr__", [](const ShrinkerSpec& s) {
            std::ostringstream o;
            o << "ShrinkerSpec(n=" << s.n << ", k=" << s.k << ", rho=" << s.rho << ")";
            return o.str();
        });
    m.def("make_shrinker", &make_shrinker, py::arg("n"), py::arg("k"));
    m.def("mode_eigenvalue", [](const ShrinkerSpec& s, std::vector<int> mi, int j) {
        ModeIndex idx;
        idx.m = std::move(mi);
        idx.j = j;
        return mode_eigenvalue(s, idx);
    }, py::arg("spec"), py::arg("m"), py::arg("j") = 0);
    m.def("neutral_gamma", &neutral_gamma);

    m.def("hermite_eval", &hermite_eval, py::arg("m"), py::arg("y"));
    m.def("triple_product", &triple_product, py::arg("m"), py::arg("n"), py::arg("l"));

    m.def("riccati_closed_form", &riccati_closed_form, py::arg("M0"), py::arg("t0"), py::arg("t"), py::arg("gamma"));
    m.def("c1_profile", [](const ShrinkerSpec& s, std::vector<int> I, std::vector<double> y, double t) {
        y.resize(2, 0.0);
        return c1_profile(s, I, y.data(), t);
    }, py::arg("spec"), py::arg("I"), py::arg("y"), py::arg("t"));

    m.def("velazquez_factor", &velazquez_factor, py::arg("n"), py::arg("r"), py::arg("r_tilde"), py::arg("tau"));
    m.def("regularization_time", &regularization_time, py::arg("t0"), py::arg("K0") = 1.0, py::arg("delta1") = 1.0);
    m.def("semigroup_at", [](const std::function<double(double)>& f, double tau, double y) {
        const Callable psi = [&](const double* z) { return f(z[0]); };
        return apply_semigroup_at(psi, tau, 1, &y);
    }, py::arg("f"), py::arg("tau"), py::arg("y"), "S(tau) f at y for a function of one axis variable");

    m.def("perturb_ode", [](double t0, double a1, double a2, double a12, double t1, const ShrinkerSpec& s, int samples) {
        std::vector<std::array<double, 4>> out;
        for (const auto& p : perturb_ode({t0, a1, a2, a12}, t1, s, samples)) out.push_back({p.t, p.a1, p.a2, p.a12});
        return out;
    }, py::arg("t0"), py::arg("a1"), py::arg("a2"), py::arg("a12"), py::arg("t1"), py::arg("spec"),
       py::arg("samples") = 200);

    m.def("sphere_extinction", [](int nodes) {
        const auto g = make_graph([](double x) { return std::sqrt(std::max(0.0, 1 - x * x)); }, -1, 1, nodes, 2, Ends::Caps);
        return evolve_aag(g).T;
    }, py::arg("nodes") = 129, "extrapolated extinction time of the unit 2-sphere");

    m.def("run_scenario", [](const std::string& text, const std::string& out_dir) {
        const auto cfg = ExperimentConfig::parse(text, "<python>");
        std::ostringstream log;
        const auto r = run_scenario(cfg, out_dir, log);
        return py::dict(py::arg("exit_code") = r.exit_code, py::arg("files") = r.files, py::arg("summary") = r.summary,
                        py::arg("log") = log.str());
    }, py::arg("config"), py::arg("out_dir"));

    m.def("criterion_names", &criterion_names);
    m.def("run_criterion", [](const std::string& name) {
        py::gil_scoped_release nogil;
        return run_criterion(name);
    });
    py::class_<CriterionResult>(m, "CriterionResult")
        .def_readonly("id", &CriterionResult::id)
        .def_readonly("name", &CriterionResult::name)
        .def_readonly("passed", &CriterionResult::pass)
        .def_readonly("detail", &CriterionResult::detail)
        .def_readonly("seconds", &CriterionResult::seconds)
        .def("__str__", &format_result);

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
