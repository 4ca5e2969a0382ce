#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "reslab/cayley.hpp"
#include "reslab/cli.hpp"
#include "reslab/congruence.hpp"
#include "reslab/error.hpp"
#include "reslab/explicit_formula.hpp"
#include "reslab/thermo.hpp"
#include "reslab/transfer.hpp"
#include "reslab/zeros.hpp"

namespace py = pybind11;
using namespace reslab;

namespace {

SchottkyGroup group_from(const std::string& spec) {
    return spec.empty() || spec.front() != '{' ? preset_by_name(spec) : cli::build_group(nlohmann::json::parse(spec));
}

TwistSpec twist_from(const std::vector<double>& theta) {
    return theta.empty() ? TwistSpec::trivial() : TwistSpec::abelian(theta);
}

}  // namespace

PYBIND11_MODULE(_reslab, m) {
    m.doc() = "Resonances of Schottky surfaces and their covers";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def("validate", [](const std::string& group) { return validate(group_from(group)).ok(); }, py::arg("group"),
          "True when the discs and generators pass every geometric check.");
    m.def("pressure", [](const std::string& group, double sigma, int lmax) {
        return pressure(group_from(group), sigma, lmax);
    }, py::arg("group"), py::arg("sigma"), py::arg("lmax") = 32);
    m.def("critical_exponent", [](const std::string& group, int lmax, double tol) {
        return critical_exponent(group_from(group), lmax, tol);
    }, py::arg("group"), py::arg("lmax") = 32, py::arg("tol") = 1e-12);
    m.def("determinant", [](const std::string& group, cd s, std::vector<double> theta, int lmax) {
        return fredholm_det(assemble(group_from(group), s, twist_from(theta), lmax));
    }, py::arg("group"), py::arg("s"), py::arg("theta") = std::vector<double>{}, py::arg("lmax") = 32,
          "det(I - L_s) for the trivial twist, or the abelian twist theta.");
    m.def("resonances", [](const std::string& group, std::vector<double> rect, std::vector<double> theta, int lmax) {
        if (rect.size() != 4) throw ValidationError("python", "rect needs 4 numbers");
        const auto f = determinant_function(group_from(group), twist_from(theta), lmax);
        const ResonanceSet rs = resonances(f, {rect[0], rect[1], rect[2], rect[3]});
        std::vector<std::pair<cd, int>> out;
        for (const auto& z : rs.zeros) out.emplace_back(z.s, z.multiplicity);
        return out;
    }, py::arg("group"), py::arg("rect"), py::arg("theta") = std::vector<double>{}, py::arg("lmax") = 32,
          "List of (s, multiplicity) in rect = [re_min, re_max, im_min, im_max].");
    m.def("class_sizes", [](std::int64_t p) {
        std::vector<std::pair<std::string, std::int64_t>> out;
        for (const auto& c : class_statistics(p, 0).classes) out.emplace_back(c.label.to_string(), c.size);
        return out;
    }, py::arg("p"));
    m.def("spectral_gap", [](int N) { return spectral_gap(CayleyGraph::cycle(N)); }, py::arg("N"),
          "lambda_1 of the cycle Z/N with generators +-1.");
    m.def("test_function", [](double epsilon, int J, int points) {
        const TestFunction f = build_test_function(epsilon, J, points);
        return py::make_tuple(f.x, f.values);
    }, py::arg("epsilon") = 0.5, py::arg("J") = 12, py::arg("points") = 1 << 12);
    m.def("run", [](const std::string& config) {
        const cli::RunResult r = cli::run(cli::parse_config(nlohmann::json::parse(config)));
        return py::make_tuple(r.status, r.summary, r.outputs);
    }, py::arg("config"), "Runs an experiment from a JSON config; returns (status, summary, outputs).");
}
