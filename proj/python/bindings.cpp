// Python access to the census, cycle search and curve location.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "josephson/dataset.hpp"

namespace py = pybind11;
using namespace josephson;

namespace {

py::dict cycle_dict(const LimitCycle& c) {
    py::dict d;
    d["kind"] = to_string(c.kind);
    d["x0"] = c.x0;
    d["y0"] = c.y0;
    d["g_prime"] = c.g_prime;
    d["g_second"] = c.g_second;
    d["stability"] = to_string(c.stability);
    d["multiplicity_estimate"] = c.multiplicity_estimate;
    return d;
}

py::list cycle_list(const std::vector<LimitCycle>& cs) {
    py::list l;
    for (const auto& c : cs) l.append(cycle_dict(c));
    return l;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Limit cycles of the Josephson equation";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ResolutionError>(m, "ResolutionError", PyExc_ArithmeticError);
    py::register_exception<StiffnessError>(m, "StiffnessError", PyExc_ArithmeticError);

    py::class_<Params>(m, "Params")
        .def(py::init([](double a, double b, double c) { return Params{a, b, c}; }), py::arg("a"), py::arg("b"),
             py::arg("c"))
        .def_readwrite("a", &Params::a)
        .def_readwrite("b", &Params::b)
        .def_readwrite("c", &Params::c)
        .def("hopf_b", &Params::hopf_b)
        .def("__repr__", [](const Params& p) {
            return "Params(a=" + format_number(p.a) + ", b=" + format_number(p.b) + ", c=" + format_number(p.c) + ")";
        });

    m.def("from_physical", &from_physical, py::arg("alpha"), py::arg("beta"), py::arg("gamma"));

    m.def(
        "census",
        [](double a, double b, double c) {
            CycleCensus cen;
            {
                py::gil_scoped_release nogil;
                cen = census(Params{a, b, c});
            }
            py::dict d;
            d["label"] = cen.label.label;
            d["boundary"] = cen.label.boundary;
            d["i"] = cen.i;
            d["j"] = cen.j;
            d["j_pos"] = cen.j_pos();
            d["j_neg"] = cen.j_neg();
            d["first_kind"] = cycle_list(cen.first);
            d["second_kind_positive"] = cycle_list(cen.second_pos);
            d["second_kind_negative"] = cycle_list(cen.second_neg);
            d["agreement"] = cen.agreement ? py::object(py::bool_(*cen.agreement)) : py::object(py::none());
            d["near_bifurcation"] = cen.near_bifurcation;
            d["flags"] = cen.flags;
            return d;
        },
        py::arg("a"), py::arg("b"), py::arg("c"));

    m.def(
        "census_json", [](double a, double b, double c) { return census_json(census(Params{a, b, c})); },
        py::arg("a"), py::arg("b"), py::arg("c"));

    m.def(
        "zero_coefficients",
        [](double a, double b, double c) {
            const auto z = zero_coefficients(Params{a, b, c});
            return py::make_tuple(z.G2, z.G3, z.G4);
        },
        py::arg("a"), py::arg("b"), py::arg("c"));

    m.def(
        "locate_curve",
        [](const std::string& name, double a, double c) -> py::object {
            const auto curve = parse_curve(name);
            if (!curve) throw DomainError("curve must be phi, psi1 or psi2");
            const auto s = locate_curve(*curve, a, c);
            if (!s.found) return py::none();
            return py::float_(s.b);
        },
        py::arg("name"), py::arg("a"), py::arg("c"));

    m.def(
        "displacement",
        [](double a, double b, double c, double y0) {
            const auto d = poincare_displacement(Params{a, b, c}, 0.0, y0);
            if (d.escaped) throw ResolutionError("orbit escaped before x = 2 pi");
            return d.value;
        },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("y0"));
}
