#include "vortex/cli.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace vortex;

namespace {

Configuration as_config(const Vec& z) {
    if (z.size() % 2 != 0) throw InvalidSystem("positions must have even length (x1, y1, x2, y2, ...)");
    return Configuration(z);
}

py::dict triple(const InertiaTriple& t) {
    py::dict d;
    d["n_minus"] = t.n_minus;
    d["n_zero"] = t.n_zero;
    d["n_plus"] = t.n_plus;
    return d;
}

py::dict spectrum_dict(const SpectralReport& r) {
    py::dict d;
    d["omega"] = r.omega;
    d["scale"] = r.scale;
    d["eigenvalues_b"] = r.eigenvalues_b;
    d["nontrivial_part"] = r.nontrivial_part;
    d["mus"] = r.mus;
    d["nontrivial_mus"] = r.nontrivial_mus;
    d["classification"] = to_string(r.classification);
    d["mu_classification"] = to_string(r.mu_classification);
    d["routes_agree"] = r.routes_agree;
    d["ambiguous"] = r.ambiguous;
    d["ambiguity_note"] = r.ambiguity_note;
    d["pairing_error"] = r.pairing_error;
    d["eigvec_condition"] = r.eigvec_condition;
    py::dict sig;
    sig["real_pairs"] = r.signature.real_pairs;
    sig["imaginary_pairs"] = r.signature.imaginary_pairs;
    sig["complex_quartets"] = r.signature.complex_quartets;
    sig["zero"] = r.signature.zero;
    d["signature"] = sig;
    return d;
}

SpectralOptions spectral_options(double tol_spec, double tol_zero, double kappa_max) {
    SpectralOptions o;
    o.tol_spec = tol_spec;
    o.tol_zero = tol_zero;
    o.kappa_max = kappa_max;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Relative equilibria of the planar N-vortex problem";

    static py::exception<Error> base(m, "VortexError");
    static py::exception<InputError> input(m, "InputError", base.ptr());
    static py::exception<NumericalError> numerical(m, "NumericalError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InputError& e) {
            PyErr_SetString(input.ptr(), (std::string(e.kind()) + ": " + e.what()).c_str());
        } catch (const NumericalError& e) {
            PyErr_SetString(numerical.ptr(), (std::string(e.kind()) + ": " + e.what()).c_str());
        }
    });

    py::class_<CentralConfiguration>(m, "CentralConfiguration")
        .def_property_readonly("circulations",
                               [](const CentralConfiguration& c) {
                                   auto g = c.system.circulations();
                                   return std::vector<double>(g.begin(), g.end());
                               })
        .def_property_readonly("xi", [](const CentralConfiguration& c) { return Vec(c.xi.coords()); })
        .def_readonly("omega", &CentralConfiguration::omega)
        .def_readonly("residual_norm", &CentralConfiguration::residual_norm)
        .def_readonly("iterations", &CentralConfiguration::iterations)
        .def("__repr__", [](const CentralConfiguration& c) {
            std::ostringstream s;
            s << "<CentralConfiguration N=" << c.system.size() << " omega=" << c.omega << ">";
            return s.str();
        });

    m.def("hamiltonian", [](const std::vector<double>& g, const Vec& z) {
        return hamiltonian(VortexSystem(g), as_config(z));
    }, py::arg("circulations"), py::arg("positions"));
    m.def("grad_hamiltonian", [](const std::vector<double>& g, const Vec& z) {
        return grad_hamiltonian(VortexSystem(g), as_config(z));
    }, py::arg("circulations"), py::arg("positions"));
    m.def("hessian", [](const std::vector<double>& g, const Vec& z) {
        return hessian(VortexSystem(g), as_config(z));
    }, py::arg("circulations"), py::arg("positions"));
    m.def("vector_field", [](const std::vector<double>& g, const Vec& z) {
        return vector_field(VortexSystem(g), as_config(z));
    }, py::arg("circulations"), py::arg("positions"));

    m.def("make_equilateral_triangle", &make_equilateral_triangle, py::arg("g1"), py::arg("g2"), py::arg("g3"));
    m.def("make_rhombus", [](double mm, const std::string& b) { return make_rhombus(mm, parse_branch(b)); },
          py::arg("m"), py::arg("branch") = "A");
    m.def("find_cc", [](const std::vector<double>& g, const Vec& z) {
        return find_cc(VortexSystem(g), as_config(z));
    }, py::arg("circulations"), py::arg("guess"));

    m.def("stability_matrix", &stability_matrix);
    m.def("a_hat", &a_hat);
    m.def("nontrivial_spectrum", [](const CentralConfiguration& cc, double ts, double tz, double k) {
        return spectrum_dict(nontrivial_spectrum(cc, spectral_options(ts, tz, k)));
    }, py::arg("cc"), py::arg("tol_spec") = 1e-8, py::arg("tol_zero") = 1e-8, py::arg("kappa_max") = 1e8);
    m.def("classify", [](const CentralConfiguration& cc, double ts, double tz, double k) {
        return std::string(to_string(classify(cc, spectral_options(ts, tz, k))));
    }, py::arg("cc"), py::arg("tol_spec") = 1e-8, py::arg("tol_zero") = 1e-8, py::arg("kappa_max") = 1e8);

    m.def("inertia", [](const Mat& a, double tol) { return triple(inertia_of(a, tol)); }, py::arg("matrix"),
          py::arg("zero_tol") = 1e-9);
    m.def("check_theorem_b", [](const CentralConfiguration& cc) {
        const InertiaReport r = check_theorem_b(cc);
        py::dict d;
        d["inertia_ahat"] = triple(r.inertia_ahat);
        d["inertia_m"] = triple(r.inertia_m);
        d["inertia_ahat_wperp"] = triple(r.inertia_ahat_wperp);
        d["inertia_m_wperp"] = triple(r.inertia_m_wperp);
        d["m_xi_xi"] = r.m_xi_xi;
        d["classification"] = to_string(r.classification);
        d["predicted_n_minus"] = r.predicted_n_minus;
        d["index_formula_holds"] = r.index_formula_holds;
        d["restriction_formula_holds"] = r.restriction_formula_holds;
        d["verdict"] = to_string(r.verdict);
        d["matching_forms"] = r.matching_forms;
        d["details"] = r.details;
        return d;
    });

    m.def("integrate", [](const std::vector<double>& g, const Vec& z, double t_end) {
        const Trajectory tr = integrate(VortexSystem(g), as_config(z), t_end);
        py::dict d;
        d["times"] = tr.times;
        std::vector<Vec> states;
        for (const auto& s : tr.states) states.emplace_back(s.coords());
        d["states"] = states;
        d["max_rel_h_drift"] = tr.max_rel_h_drift;
        d["max_rel_i_drift"] = tr.max_rel_i_drift;
        d["max_center_drift"] = tr.max_center_drift;
        return d;
    }, py::arg("circulations"), py::arg("positions"), py::arg("t_end"));
    m.def("monodromy", [](const CentralConfiguration& cc) {
        const MonodromyResult r = monodromy(cc);
        py::dict d;
        d["period"] = r.period;
        d["matrix"] = r.matrix;
        d["multipliers"] = r.multipliers;
        d["determinant"] = r.determinant;
        d["floquet_mismatch"] = floquet_vs_spectrum(cc, r);
        return d;
    });

    m.def("analyze", [](const std::string& input, bool solve, bool verify_dynamics) {
        cli::AnalyzeFlags f;
        f.solve = solve;
        f.verify_dynamics = verify_dynamics;
        return cli::analyze_json(input, f);
    }, py::arg("input"), py::arg("solve") = false, py::arg("verify_dynamics") = false,
       "AnalysisDocument for a JSON input document, as JSON text");
    m.def("run_cli", [](const std::vector<std::string>& args, const std::string& stdin_text) {
        std::ostringstream out, err;
        std::istringstream in(stdin_text);
        const int code = cli::run(args, out, err, in);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), py::arg("stdin") = "");
    m.def("rhombus_b_transition", &cli::rhombus_b_transition);
}
