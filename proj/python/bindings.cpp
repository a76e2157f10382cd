// Python view of the library: plain values in, plain values (or JSON text) out.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "plgz/census.hpp"
#include "plgz/characters.hpp"
#include "plgz/diagrams.hpp"
#include "plgz/funceq.hpp"
#include "plgz/quadform.hpp"
#include "plgz/report.hpp"
#include "plgz/weil.hpp"

namespace py = pybind11;
using namespace plgz;

namespace {

std::vector<SquareClass> classes(const std::vector<std::string>& names) {
    std::vector<SquareClass> out;
    for (const auto& s : names) out.push_back(SquareClass::parse(s));
    return out;
}

TameMultChar character(const Context& ctx, int tame_exponent, cplx at_pi) {
    const int m = ctx->p() - 1;
    return TameMultChar(ctx, at_pi, ((tame_exponent % m) + m) % m);
}

CharTuple characters(const Context& ctx, const std::vector<std::pair<int, cplx>>& xs) {
    CharTuple out;
    for (const auto& [t, v] : xs) out.push_back(character(ctx, t, v));
    return out;
}

}  // namespace

PYBIND11_MODULE(_plgz, m) {
    m.doc() = "p-adic prehomogeneous zeta toolkit";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    m.def("classify", [](const std::string& diagram_json) { return profile_to_json(classify_profile(parse_diagram(diagram_json))); },
          py::arg("diagram_json"), "graded profile of a diagram, as JSON text");
    m.def("table_diagram", [](int row, int param) -> std::optional<std::string> {
        auto D = table1_diagram(row, param);
        if (!D) return std::nullopt;
        return diagram_to_json(*D);
    }, py::arg("row"), py::arg("param"));

    m.def("form_invariants", [](int p, const std::vector<std::string>& coeffs) {
        DiagonalForm f(make_context(p), classes(coeffs));
        auto inv = isotropy_and_witt(f);
        py::dict d;
        d["rank"] = f.rank();
        d["disc"] = f.disc().name();
        d["witt_index"] = inv.witt_index;
        d["anisotropic_kernel"] = inv.anisotropic_kernel.to_string();
        d["isotropic"] = isotropic_hensel(f);
        return d;
    }, py::arg("p"), py::arg("coeffs"));

    m.def("weil_gamma", [](int p, const std::vector<std::string>& coeffs) {
        return weil_gamma(DiagonalForm(make_context(p), classes(coeffs))).value;
    }, py::arg("p"), py::arg("coeffs"));

    m.def("gamma_k", [](int p, const std::vector<std::string>& a, const std::string& c, int e, int d) {
        return gamma_k(classes(a), SquareClass::parse(c), e, d, make_context(p)).value;
    }, py::arg("p"), py::arg("a"), py::arg("c"), py::arg("e") = 1, py::arg("d") = 1);

    m.def("tate_rho", [](int p, int tame_exponent, cplx at_pi, cplx s) {
        auto ctx = make_context(p);
        return tate_rho(character(ctx, tame_exponent, at_pi), s);
    }, py::arg("p"), py::arg("tame_exponent"), py::arg("at_pi"), py::arg("s"));

    m.def("d_coefficient", [](int p, int d, int e, const std::vector<std::string>& a, const std::vector<std::string>& c,
                             const std::vector<std::pair<int, cplx>>& omega, const std::vector<cplx>& s) {
        auto ctx = make_context(p);
        return D_closed(ctx, d, e, classes(a), classes(c), characters(ctx, omega), s);
    }, py::arg("p"), py::arg("d"), py::arg("e"), py::arg("a"), py::arg("c"), py::arg("omega"), py::arg("s"));

    m.def("census_counts", [](int p, int n, bool plus, int depth) {
        RealizationContext R(Family::SP, n, make_context(p));
        return cached_census(R, plus ? Side::Plus : Side::Minus, depth).to_json().dump();
    }, py::arg("p"), py::arg("n"), py::arg("plus"), py::arg("depth"), "symmetric-matrix census as JSON text");

    m.def("verify", [](const std::string& suite, int p, uint64_t seed) {
        SuiteResult r;
        if (suite == "table") r = check_table1();
        else if (suite == "quadform") r = check_quadratic_forms({p});
        else if (suite == "weil") r = check_weil_layer({p}, seed);
        else if (suite == "tate") r = check_tate_layer({p}, 10, seed);
        else if (suite == "rank_one") r = check_rank_one_fe({p}, seed);
        else if (suite == "gamma") r = check_gamma_oracle({p});
        else throw DomainError("unknown suite " + suite);
        return r.to_json().dump();
    }, py::arg("suite"), py::arg("p") = 3, py::arg("seed") = 1, "run a verification suite; JSON text");
}
