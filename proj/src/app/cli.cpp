#include "vortex/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace vortex::cli {

using nlohmann::json;

SpectralOptions Tolerances::spectral() const {
    SpectralOptions o;
    o.tol_spec = tol_spec;
    o.tol_zero = tol_zero;
    o.kappa_max = kappa_max;
    return o;
}

namespace {

const double kBoundaryA = -2.0 + std::sqrt(3.0);

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

json to_json(const InertiaTriple& t) { return {{"n_minus", t.n_minus}, {"n_zero", t.n_zero}, {"n_plus", t.n_plus}}; }

json to_json(const std::vector<cplx>& v) {
    json a = json::array();
    for (const auto& z : v) a.push_back({z.real(), z.imag()});
    return a;
}

void check_finite(const json& j, const std::string& path) {
    if (j.is_number_float()) {
        if (!std::isfinite(j.get<double>())) throw NonFiniteValue("non-finite value in " + path);
    } else if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) check_finite(it.value(), path + "." + it.key());
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) check_finite(j[i], path + "[" + std::to_string(i) + "]");
    }
}

/// A loaded problem: either a generated family member or explicit data.
struct Problem {
    std::string family;  // "", "triangle", "rhombus"
    std::vector<double> gammas;
    double m = 0.0;
    RhombusBranch branch = RhombusBranch::A;
    std::vector<double> circulations;
    Vec positions;
    std::optional<double> omega;  // carried over from a previous document
    json echo;
    json solver;  // carried over from a previous document
};

template <class T>
T field(const json& j, const char* name) {
    if (!j.contains(name)) throw ParseError(std::string("missing field '") + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("field '") + name + "': " + e.what());
    }
}

void read_explicit(const json& src, Problem& p) {
    p.circulations = field<std::vector<double>>(src, "circulations");
    const auto pos = field<std::vector<std::vector<double>>>(src, "positions");
    if (pos.size() != p.circulations.size()) {
        throw ParseError("positions and circulations have different lengths");
    }
    p.positions.resize(static_cast<Eigen::Index>(2 * pos.size()));
    for (std::size_t i = 0; i < pos.size(); ++i) {
        if (pos[i].size() != 2) throw ParseError("each position must be [x, y]");
        p.positions(static_cast<Eigen::Index>(2 * i)) = pos[i][0];
        p.positions(static_cast<Eigen::Index>(2 * i + 1)) = pos[i][1];
    }
}

void read_family(const json& src, Problem& p) {
    p.family = field<std::string>(src, "family");
    if (p.family == "triangle") {
        const char* key = src.contains("gammas") ? "gammas" : "circulations";
        p.gammas = field<std::vector<double>>(src, key);
        if (p.gammas.size() != 3) throw ParseError("triangle needs exactly three circulations");
    } else if (p.family == "rhombus") {
        p.m = field<double>(src, "m");
        try {
            p.branch = parse_branch(src.contains("branch") ? field<std::string>(src, "branch") : "A");
        } catch (const InputError& e) {
            throw ParseError(e.what());
        }
    } else {
        throw ParseError("unknown family '" + p.family + "'");
    }
}

Problem parse_problem(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("input must be a JSON object");
    Problem p;
    if (doc.contains("central_configuration")) {
        // A previously written AnalysisDocument.
        const json& cc = doc.at("central_configuration");
        read_explicit(cc, p);
        if (cc.contains("omega")) p.omega = field<double>(cc, "omega");
        p.echo = doc.value("input", json::object());
        if (p.echo.contains("family")) {
            Problem fam;
            read_family(p.echo, fam);
            p.gammas = fam.gammas;
            p.m = fam.m;
            p.branch = fam.branch;
            p.family = fam.family;
        }
        if (doc.contains("solver")) p.solver = doc.at("solver");
        return p;
    }
    p.echo = doc;
    if (doc.contains("family")) {
        read_family(doc, p);
    } else {
        read_explicit(doc, p);
    }
    return p;
}

/// Generated family members are built from their closed forms; explicit data
/// is validated, or first refined by Newton iteration with `solve`.
CentralConfiguration build_cc(Problem& p, bool solve, double tol_cc) {
    if (p.positions.size() == 0 && p.family == "triangle") {
        return make_equilateral_triangle(p.gammas[0], p.gammas[1], p.gammas[2]);
    }
    if (p.positions.size() == 0 && p.family == "rhombus") {
        return make_rhombus(p.m, p.branch);
    }
    VortexSystem sys(p.circulations);
    Configuration z(p.positions);
    require_admissible(sys, z);
    if (solve) {
        auto cc = find_cc(sys, z);
        p.solver = {{"iterations", cc.iterations}, {"residual", cc.residual_norm}};
        return cc;
    }
    const CcValidation v = validate_cc(sys, z, tol_cc);
    if (!v.is_cc) {
        std::ostringstream msg;
        msg << "not a central configuration: normalized residual " << v.residual << ", center offset "
            << v.center_offset << " (tolerance " << tol_cc << ")";
        throw ValidationFailure(msg.str());
    }
    double omega = v.omega;
    if (p.omega) {
        if (std::abs(*p.omega - v.omega) > tol_cc * std::max(1.0, std::abs(v.omega))) {
            throw ValidationFailure("recorded omega " + fmt17(*p.omega) + " disagrees with " + fmt17(v.omega));
        }
        omega = *p.omega;
    }
    return CentralConfiguration{sys, z, omega, v.residual, 0};
}

std::optional<int> reference_for(const Problem& p, double l) {
    if (p.family == "triangle" && l > 0) return reference_morse_triangle(p.gammas[0], p.gammas[1], p.gammas[2]);
    if (p.family == "rhombus") return reference_morse_rhombus(p.m, p.branch);
    return std::nullopt;
}

json dynamics_block(const CentralConfiguration& cc) {
    if (cc.omega == 0.0) return {{"skipped", "omega is zero, the equilibrium does not rotate"}};
    const double period = 2.0 * std::numbers::pi / std::abs(cc.omega);
    const Trajectory tr = integrate(cc.system, cc.xi, period);
    const MonodromyResult mono = monodromy(cc);
    double max_mod = 0.0;
    for (const auto& mu : mono.multipliers) max_mod = std::max(max_mod, std::abs(mu));
    return {{"period", period},
            {"return_error", (tr.states.back().coords() - cc.xi.coords()).norm()},
            {"max_rel_h_drift", tr.max_rel_h_drift},
            {"max_rel_i_drift", tr.max_rel_i_drift},
            {"max_center_drift", tr.max_center_drift},
            {"steps", tr.times.size() - 1},
            {"floquet_mismatch", floquet_vs_spectrum(cc, mono)},
            {"monodromy_determinant", mono.determinant},
            {"max_multiplier_modulus", max_mod},
            {"multipliers", to_json(mono.multipliers)}};
}

struct Options {
    std::string file;
    std::string family;
    std::vector<double> gammas;
    double m = std::numeric_limits<double>::quiet_NaN();
    std::string branch = "A";
    std::string out;
    Tolerances tol;
};

std::string read_input(const Options& o, std::istream& in) {
    const bool inline_spec = !o.family.empty();
    if (inline_spec && !o.file.empty()) throw ParseError("--file and --family are mutually exclusive");
    if (inline_spec) {
        json j{{"family", o.family}};
        if (o.family == "triangle") {
            if (o.gammas.empty()) throw ParseError("--family triangle needs --gammas g1,g2,g3");
            j["gammas"] = o.gammas;
        } else if (o.family == "rhombus") {
            if (std::isnan(o.m)) throw ParseError("--family rhombus needs --m");
            j["m"] = o.m;
            j["branch"] = o.branch;
        } else {
            throw ParseError("unknown family '" + o.family + "'");
        }
        return j.dump();
    }
    std::stringstream buf;
    if (!o.file.empty()) {
        std::ifstream f(o.file);
        if (!f) throw ParseError("cannot open " + o.file);
        buf << f.rdbuf();
    } else {
        buf << in.rdbuf();
    }
    return buf.str();
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
    if (o.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(o.out);
    if (!f) throw ParseError("cannot write " + o.out);
    f << text;
}

void add_common(CLI::App* app, Options& o, bool with_tolerances) {
    app->add_option("--file", o.file, "JSON input document (default: stdin)");
    app->add_option("--family", o.family, "triangle or rhombus")->check(CLI::IsMember({"triangle", "rhombus"}));
    app->add_option("--gammas", o.gammas, "triangle circulations g1,g2,g3")->delimiter(',');
    app->add_option("--m", o.m, "rhombus parameter m");
    app->add_option("--branch", o.branch, "rhombus branch")->check(CLI::IsMember({"A", "B"}));
    app->add_option("--out", o.out, "write the result to this file");
    if (with_tolerances) {
        app->add_option("--tol-cc", o.tol.tol_cc, "central configuration residual tolerance")->capture_default_str();
        app->add_option("--tol-spec", o.tol.tol_spec, "|Re lambda| tolerance (relative)")->capture_default_str();
        app->add_option("--tol-zero", o.tol.tol_zero, "|lambda^2| degeneracy tolerance (relative)")
            ->capture_default_str();
        app->add_option("--kappa-max", o.tol.kappa_max, "eigenvector condition bound")->capture_default_str();
    }
}

/// Maps an exception to an exit code and a message naming the stage.
int report_error(const std::string& stage, std::ostream& err) {
    try {
        throw;
    } catch (const ParseError& e) {
        err << "error [" << stage << "] parse: " << e.what() << "\n";
        return kParse;
    } catch (const InputError& e) {
        err << "error [" << stage << "] " << e.kind() << ": " << e.what() << "\n";
        return kValidation;
    } catch (const NumericalError& e) {
        err << "error [" << stage << "] " << e.kind() << ": " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        err << "error [" << stage << "] internal: " << e.what() << "\n";
        return kNumerical;
    }
}

int run_sweep(const Options& o, double from, double to, double step, bool locate, int samples, unsigned seed,
              unsigned threads, std::ostream& out, std::ostream& err) {
    if (o.family == "triangle") {
        emit(o, triangle_csv(sweep_triangle(samples, seed, o.tol)), out);
        return kOk;
    }
    if (o.family != "rhombus") throw ParseError("sweep needs --family triangle or --family rhombus");
    if (!(step > 0) || !(to >= from)) throw ParseError("sweep needs --m-from <= --m-to and --m-step > 0");
    const RhombusBranch b = parse_branch(o.branch);
    auto rows = sweep_rhombus(b, from, to, step, o.tol, threads);
    if (locate) {
        for (const auto& bd : locate_boundaries(b, rows, o.tol)) {
            RhombusRow r = rhombus_row(bd.m, b, o.tol);
            r.kind = "boundary";
            std::ostringstream note;
            note << "real pairs " << bd.pairs_lo << "->" << bd.pairs_hi << ", n-(A) " << bd.morse_lo << "->"
                 << bd.morse_hi << ", " << bd.class_lo << "->" << bd.class_hi << ", bracket [" << fmt17(bd.lo)
                 << ", " << fmt17(bd.hi) << "]";
            r.note = note.str();
            rows.push_back(std::move(r));
        }
        std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& c) { return a.m < c.m; });
    }
    int failed = 0;
    for (const auto& r : rows) failed += r.error.empty() ? 0 : 1;
    if (failed) err << failed << " row(s) flagged with errors\n";
    emit(o, rhombus_csv(rows), out);
    return kOk;
}

int run_integrate(const Options& o, int periods, double t_end, std::istream& in, std::ostream& out) {
    Problem p = parse_problem(read_input(o, in));
    std::optional<CentralConfiguration> cc;
    if (p.positions.size() == 0) {
        cc = build_cc(p, false, o.tol.tol_cc);
    } else {
        VortexSystem s(p.circulations);
        Configuration z(p.positions);
        require_admissible(s, z);
        if (validate_cc(s, z, o.tol.tol_cc).is_cc) cc = build_cc(p, false, o.tol.tol_cc);
    }
    const VortexSystem sys = cc ? cc->system : VortexSystem(p.circulations);
    const Configuration z0 = cc ? cc->xi : Configuration(p.positions);
    if (!cc && !(t_end > 0)) {
        throw ValidationFailure("input is not a central configuration; pass --t-end for a plain integration");
    }
    std::ostringstream txt;
    txt << "# " << kToolName << " " << kToolVersion << " integrate\n";

    const double h0 = hamiltonian(sys, z0);
    const double i0 = angular_impulse(sys, z0);
    const Point c0 = center_of_vorticity(sys, z0);
    const bool rotating = cc && cc->omega != 0.0;
    const double seg = rotating && !(t_end > 0) ? 2.0 * std::numbers::pi / std::abs(cc->omega) : t_end / periods;
    txt << "segment_length " << fmt17(seg) << "\n";
    txt << "segment time rel_h_drift rel_i_drift center_drift orbit_error steps\n";
    double hd = 0.0, idr = 0.0, cd = 0.0;
    Configuration z = z0;
    for (int k = 1; k <= periods; ++k) {
        const Trajectory tr = integrate(sys, z, seg);
        for (const auto& s : tr.invariant_drift) {
            hd = std::max(hd, std::abs(s.hamiltonian - h0) / std::max(1.0, std::abs(h0)));
            idr = std::max(idr, std::abs(s.impulse - i0) / std::max(1.0, std::abs(i0)));
            cd = std::max(cd, (s.center - c0).norm());
        }
        z = tr.states.back();
        const double t = k * seg;
        const double orbit = cc ? (z.coords() - exact_re_orbit(*cc, t).coords()).norm()
                                : std::numeric_limits<double>::quiet_NaN();
        txt << k << " " << fmt17(t) << " " << fmt17(hd) << " " << fmt17(idr) << " " << fmt17(cd) << " "
            << (cc ? fmt17(orbit) : std::string("n/a")) << " " << tr.times.size() - 1 << "\n";
    }
    if (rotating) {
        const MonodromyResult mono = monodromy(*cc);
        double max_mod = 0.0;
        for (const auto& mu : mono.multipliers) max_mod = std::max(max_mod, std::abs(mu));
        txt << "floquet_mismatch " << fmt17(floquet_vs_spectrum(*cc, mono)) << "\n";
        txt << "monodromy_determinant " << fmt17(mono.determinant) << "\n";
        txt << "max_multiplier_modulus " << fmt17(max_mod) << "\n";
        txt << "multiplier_outside_unit_circle " << (max_mod > 1.0 + 1e-4 ? "yes" : "no") << "\n";
    }
    emit(o, txt.str(), out);
    return kOk;
}

}  // namespace

double rhombus_b_transition() {
    // 27m^2 + 6m + 7 > 0, so the cubic is increasing and bisection on [-1, 0] suffices.
    auto f = [](double m) { return ((9 * m + 3) * m + 7) * m + 5; };
    double lo = -1.0, hi = 0.0;
    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) < 0 ? lo : hi) = mid;
    }
    return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

std::optional<int> reference_morse_rhombus(double m, RhombusBranch branch) {
    if (branch == RhombusBranch::A) {
        if (m > 0 && m <= 1) return 0;
        if (m > kBoundaryA && m < 0) return 3;
        if (m > -1 && m < kBoundaryA) return 4;
        return std::nullopt;
    }
    const double ms = rhombus_b_transition();
    if (m > kBoundaryA && m < 0) return 2;
    if (m > ms && m < kBoundaryA) return 4;
    if (m > -1 && m < ms) return 3;
    return std::nullopt;
}

std::optional<int> reference_morse_triangle(double g1, double g2, double g3) {
    const int positives = (g1 > 0) + (g2 > 0) + (g3 > 0);
    switch (positives) {
        case 3:
        case 0:
            return 0;
        case 2:
            return 1;
        default:
            return 2;
    }
}

int strict_real_pairs(const SpectralReport& rep) { return rep.signature.real_pairs; }

InertiaOutcome inertia_outcome(const CentralConfiguration& cc, const InertiaOptions& opts) {
    InertiaOutcome out;
    try {
        out.report = check_theorem_b(cc, opts);
        return out;
    } catch (const IndefiniteSignXi& e) {
        out.sign_xi_undefined = true;
        out.note = e.what();
    }
    auto& r = out.report;
    r.inertia_ahat = inertia_of(a_hat(cc), opts.zero_tol);
    r.inertia_m = inertia_of(mass_matrix(cc.system), opts.zero_tol);
    r.m_xi_xi = circulation_inner(cc.system, cc.xi.coords(), cc.xi.coords());
    r.omega_sign = (cc.omega > 0) - (cc.omega < 0);
    r.classification = nontrivial_spectrum(cc, opts.spectral).classification;
    r.verdict = TheoremBVerdict::NotApplicable;
    const int n = r.inertia_ahat.n_minus;
    const std::pair<const char*, int> forms[] = {{"n-(M)", r.inertia_m.n_minus},
                                                 {"n-(M)-1", r.inertia_m.n_minus - 1},
                                                 {"n+(M)-1", r.inertia_m.n_plus - 1},
                                                 {"n+(M)", r.inertia_m.n_plus}};
    for (const auto& [label, value] : forms)
        if (value == n) r.matching_forms.emplace_back(label);
    r.details = out.note;
    return out;
}

RhombusRow rhombus_row(double m, RhombusBranch branch, const Tolerances& tol) {
    RhombusRow row;
    row.m = m;
    row.reference_morse = reference_morse_rhombus(m, branch);
    try {
        const auto cc = make_rhombus(m, branch);
        row.y = std::sqrt(rhombus_y_squared(m, branch));
        row.omega = cc.omega;
        std::tie(row.mu1, row.mu2) = rhombus_nontrivial_mus(m, branch);
        const SpectralReport rep = nontrivial_spectrum(cc, tol.spectral());
        row.classification = to_string(rep.classification);
        row.real_pairs = strict_real_pairs(rep);
        InertiaOptions io;
        io.spectral = tol.spectral();
        const InertiaOutcome inr = inertia_outcome(cc, io);
        row.n_minus_ahat = inr.report.inertia_ahat.n_minus;
        row.n_minus_m = inr.report.inertia_m.n_minus;
        row.m_xi_xi = inr.report.m_xi_xi;
        row.theorem_b = to_string(inr.report.verdict);
        row.matching_forms = join(inr.report.matching_forms, ";");
        if (inr.sign_xi_undefined) row.note = inr.note;
        if (rep.ambiguous) {
            row.error = "AmbiguousClassification: " + rep.ambiguity_note;
        } else if (!rep.routes_agree) {
            row.error = std::string("ClassificationMismatch: mu criterion gives ") + to_string(rep.mu_classification);
        }
    } catch (const Error& e) {
        row.error = std::string(e.kind()) + ": " + e.what();
    }
    return row;
}

std::vector<RhombusRow> sweep_rhombus(RhombusBranch branch, double from, double to, double step,
                                      const Tolerances& tol, unsigned threads) {
    std::vector<double> grid;
    for (long k = 0;; ++k) {
        double m = from + static_cast<double>(k) * step;
        m = std::round(m * 1e12) / 1e12;
        if (m > to + 1e-12) break;
        grid.push_back(m);
    }
    std::vector<RhombusRow> rows(grid.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, grid.size())));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < grid.size(); i = next++) rows[i] = rhombus_row(grid[i], branch, tol);
        });
    }
    for (auto& th : pool) th.join();
    return rows;
}

std::vector<Boundary> locate_boundaries(RhombusBranch branch, const std::vector<RhombusRow>& rows,
                                        const Tolerances& tol, double width) {
    using Key = std::pair<int, int>;
    auto key = [&](double m) {
        const auto cc = make_rhombus(m, branch);
        const auto rep = nontrivial_spectrum(cc, tol.spectral());
        return Key{strict_real_pairs(rep), inertia_of(a_hat(cc)).n_minus};
    };
    std::vector<Boundary> out;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const auto& a = rows[i];
        const auto& b = rows[i + 1];
        if (a.kind != "sample" || b.kind != "sample") continue;
        if (!a.error.empty() || !b.error.empty()) continue;
        const Key ka{a.real_pairs, a.n_minus_ahat};
        const Key kb{b.real_pairs, b.n_minus_ahat};
        if (ka == kb) continue;
        Boundary bd{0.0, a.m, b.m, a.real_pairs, b.real_pairs, a.n_minus_ahat, b.n_minus_ahat,
                    a.classification, b.classification};
        try {
            while (bd.hi - bd.lo > width) {
                const double mid = 0.5 * (bd.lo + bd.hi);
                (key(mid) == ka ? bd.lo : bd.hi) = mid;
            }
        } catch (const Error&) {
            // Leave the bracket where it stopped; the boundary row carries the error.
        }
        bd.m = 0.5 * (bd.lo + bd.hi);
        out.push_back(bd);
    }
    return out;
}

std::vector<TriangleRow> sweep_triangle(int samples, unsigned seed, const Tolerances& tol) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(0.3, 2.0);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    struct Pattern {
        const char* name;
        std::array<double, 3> representative;
    };
    const Pattern patterns[] = {{"+++", {1, 1, 1}},
                                {"---", {-1, -1, -1}},
                                {"++-", {1, 1, -0.4}},
                                {"+--", {-1, -1, 0.4}}};
    std::vector<TriangleRow> rows;
    for (int p = 0; p < 4; ++p) {
        for (int s = 0; s < std::max(1, samples); ++s) {
            std::array<double, 3> g = patterns[p].representative;
            if (s > 0) {
                const double a = mag(rng), b = mag(rng);
                const double c = p < 2 ? mag(rng) : -frac(rng) * a * b / (a + b);
                g = {a, b, c};
                if (p == 1 || p == 3) g = {-a, -b, -c};
            }
            TriangleRow row;
            row.pattern = patterns[p].name;
            row.g1 = g[0];
            row.g2 = g[1];
            row.g3 = g[2];
            row.l = g[0] * g[1] + g[1] * g[2] + g[0] * g[2];
            if (row.l > 0) row.reference_morse = reference_morse_triangle(g[0], g[1], g[2]);
            try {
                const auto cc = make_equilateral_triangle(g[0], g[1], g[2]);
                row.omega = cc.omega;
                const auto rep = nontrivial_spectrum(cc, tol.spectral());
                row.classification = to_string(rep.classification);
                InertiaOptions io;
                io.spectral = tol.spectral();
                const auto inr = inertia_outcome(cc, io);
                row.n_minus_ahat = inr.report.inertia_ahat.n_minus;
                row.n_minus_m = inr.report.inertia_m.n_minus;
                row.n_plus_m = inr.report.inertia_m.n_plus;
                row.m_xi_xi = inr.report.m_xi_xi;
                row.theorem_b = to_string(inr.report.verdict);
                row.matching_forms = join(inr.report.matching_forms, ";");
                if (rep.ambiguous) row.error = "AmbiguousClassification: " + rep.ambiguity_note;
            } catch (const Error& e) {
                row.error = std::string(e.kind()) + ": " + e.what();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string rhombus_csv(const std::vector<RhombusRow>& rows) {
    std::ostringstream s;
    s << "kind,m,y,omega,mu1,mu2,classification,n_minus_ahat,n_minus_m,m_xi_xi,theorem_b,reference_morse,"
         "reference_match,matching_forms,real_pairs,note,error\r\n";
    for (const auto& r : rows) {
        const bool ok = !r.classification.empty();
        auto num = [&](double v) { return ok ? fmt17(v) : std::string(); };
        s << r.kind << "," << fmt17(r.m) << "," << num(r.y) << "," << num(r.omega) << "," << num(r.mu1) << ","
          << num(r.mu2) << "," << r.classification << "," << (ok ? std::to_string(r.n_minus_ahat) : "") << ","
          << (ok ? std::to_string(r.n_minus_m) : "") << "," << num(r.m_xi_xi) << "," << r.theorem_b << ","
          << (r.reference_morse ? std::to_string(*r.reference_morse) : "") << ","
          << (ok && r.reference_morse ? (*r.reference_morse == r.n_minus_ahat ? "match" : "mismatch") : "")
          << "," << csv_field(r.matching_forms) << "," << (ok ? std::to_string(r.real_pairs) : "") << ","
          << csv_field(r.note) << "," << csv_field(r.error) << "\r\n";
    }
    return s.str();
}

std::string triangle_csv(const std::vector<TriangleRow>& rows) {
    std::ostringstream s;
    s << "pattern,g1,g2,g3,L,omega,classification,n_minus_ahat,n_minus_m,n_plus_m,m_xi_xi,theorem_b,"
         "reference_morse,reference_match,matching_forms,error\r\n";
    for (const auto& r : rows) {
        const bool ok = !r.classification.empty();
        s << csv_field(r.pattern) << "," << fmt17(r.g1) << "," << fmt17(r.g2) << "," << fmt17(r.g3) << ","
          << fmt17(r.l) << "," << (ok ? fmt17(r.omega) : "") << "," << r.classification << ","
          << (ok ? std::to_string(r.n_minus_ahat) : "") << "," << (ok ? std::to_string(r.n_minus_m) : "") << ","
          << (ok ? std::to_string(r.n_plus_m) : "") << "," << (ok ? fmt17(r.m_xi_xi) : "") << "," << r.theorem_b
          << "," << (r.reference_morse ? std::to_string(*r.reference_morse) : "") << ","
          << (ok && r.reference_morse ? (*r.reference_morse == r.n_minus_ahat ? "match" : "mismatch") : "")
          << "," << csv_field(r.matching_forms) << "," << csv_field(r.error) << "\r\n";
    }
    return s.str();
}

std::string analyze_json(const std::string& input, const AnalyzeFlags& flags) {
    Problem p = parse_problem(input);
    const CentralConfiguration cc = build_cc(p, flags.solve, flags.tol.tol_cc);
    const auto& sys = cc.system;
    const Vec xi = cc.xi.coords();

    json doc;
    doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    doc["input"] = p.echo;
    doc["tolerances"] = {{"tol_cc", flags.tol.tol_cc},
                         {"tol_spec", flags.tol.tol_spec},
                         {"tol_zero", flags.tol.tol_zero},
                         {"kappa_max", flags.tol.kappa_max},
                         {"inertia_zero_tol", InertiaOptions{}.zero_tol}};
    if (!p.solver.is_null()) doc["solver"] = p.solver;

    json positions = json::array();
    for (std::size_t i = 0; i < cc.xi.size(); ++i) positions.push_back({cc.xi.point(i).x(), cc.xi.point(i).y()});
    const double residual = cc_residual(sys, cc.xi, cc.omega).norm() /
                            std::max(1.0, grad_hamiltonian(sys, cc.xi).norm());
    doc["central_configuration"] = {{"circulations", sys.circulations()},
                                    {"positions", positions},
                                    {"omega", cc.omega},
                                    {"residual", residual},
                                    {"m_xi_xi", circulation_inner(sys, xi, xi)},
                                    {"L", sys.angular_momentum()},
                                    {"total_circulation", sys.total_circulation()},
                                    {"angular_impulse", angular_impulse(sys, cc.xi)}};

    const SpectralOptions so = flags.tol.spectral();
    const SpectralReport rep = nontrivial_spectrum(cc, so);
    if (rep.ambiguous) throw AmbiguousClassification("spectral classification is ambiguous: " + rep.ambiguity_note);
    if (!rep.routes_agree) {
        throw ClassificationMismatch(std::string("sigma(B) gives ") + to_string(rep.classification) +
                                     ", the mu criterion gives " + to_string(rep.mu_classification));
    }
    json trivial = json::array();
    for (const auto& t : rep.trivial_part)
        trivial.push_back({{"value", {t.value.real(), t.value.imag()}}, {"witness", t.witness}, {"residual", t.residual}});
    doc["spectral"] = {{"classification", to_string(rep.classification)},
                       {"mu_classification", to_string(rep.mu_classification)},
                       {"routes_agree", rep.routes_agree},
                       {"scale", rep.scale},
                       {"eigenvalues_b", to_json(rep.eigenvalues_b)},
                       {"trivial_part", trivial},
                       {"nontrivial_part", to_json(rep.nontrivial_part)},
                       {"mus", to_json(rep.mus)},
                       {"nontrivial_mus", to_json(rep.nontrivial_mus)},
                       {"pairing_error", rep.pairing_error},
                       {"pairing_case_mismatches", rep.pairing_case_mismatches},
                       {"eigvec_condition", rep.eigvec_condition},
                       {"min_abs_lambda_sq", rep.min_abs_lambda_sq},
                       {"max_abs_re_lambda", rep.max_abs_re_lambda},
                       {"signature",
                        {{"real_pairs", rep.signature.real_pairs},
                         {"imaginary_pairs", rep.signature.imaginary_pairs},
                         {"complex_quartets", rep.signature.complex_quartets},
                         {"zero", rep.signature.zero}}}};

    InertiaOptions io;
    io.spectral = so;
    const InertiaOutcome inr = inertia_outcome(cc, io);
    const InertiaReport& ir = inr.report;
    json inertia = {{"ahat", to_json(ir.inertia_ahat)},
                    {"m", to_json(ir.inertia_m)},
                    {"m_xi_xi", ir.m_xi_xi},
                    {"omega_sign", ir.omega_sign},
                    {"verdict", to_string(ir.verdict)},
                    {"matching_forms", ir.matching_forms},
                    {"details", ir.details}};
    if (!inr.sign_xi_undefined) {
        inertia["ahat_w"] = to_json(ir.inertia_ahat_w);
        inertia["m_w"] = to_json(ir.inertia_m_w);
        inertia["ahat_wperp"] = to_json(ir.inertia_ahat_wperp);
        inertia["m_wperp"] = to_json(ir.inertia_m_wperp);
        inertia["predicted_n_minus"] = ir.predicted_n_minus;
        inertia["predicted_n_minus_wperp"] = ir.predicted_n_minus_wperp;
        inertia["index_formula_holds"] = ir.index_formula_holds;
        inertia["restriction_formula_holds"] = ir.restriction_formula_holds;
    }
    if (const auto ref = reference_for(p, sys.angular_momentum())) {
        inertia["reference_morse"] = *ref;
        inertia["reference_match"] = *ref == ir.inertia_ahat.n_minus;
    }
    doc["inertia"] = inertia;
    doc["morse_index"] = ir.inertia_ahat.n_minus;

    if (flags.verify_dynamics) doc["dynamics"] = dynamics_block(cc);
    check_finite(doc, "document");
    return doc.dump(2) + "\n";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
    CLI::App app{"Relative equilibria of the planar N-vortex problem: stability and Morse indices"};
    app.name(kToolName);
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    Options ao, so, io;
    AnalyzeFlags af;
    auto* analyze = app.add_subcommand("analyze", "analyze one configuration and print an AnalysisDocument");
    add_common(analyze, ao, true);
    analyze->add_flag("--solve", af.solve, "refine the input with Newton iteration first");
    analyze->add_flag("--verify-dynamics", af.verify_dynamics, "integrate one period and compare Floquet multipliers");

    double from = -0.99, to = 1.0, step = 0.01;
    bool locate = false;
    int samples = 4;
    unsigned seed = 1, threads = 0;
    auto* sweep = app.add_subcommand("sweep", "tabulate a family as CSV");
    add_common(sweep, so, true);
    sweep->add_option("--m-from", from, "first rhombus parameter")->capture_default_str();
    sweep->add_option("--m-to", to, "last rhombus parameter (inclusive)")->capture_default_str();
    sweep->add_option("--m-step", step, "grid spacing")->capture_default_str();
    sweep->add_flag("--locate-boundaries", locate, "bisect type changes to 1e-8");
    sweep->add_option("--samples", samples, "triangle samples per sign pattern")->capture_default_str();
    sweep->add_option("--seed", seed, "triangle sampling seed")->capture_default_str();
    sweep->add_option("--threads", threads, "worker threads (0 = all cores)");

    int periods = 1;
    double t_end = 0.0;
    auto* integ = app.add_subcommand("integrate", "integrate the equations of motion and report drifts");
    add_common(integ, io, false);
    integ->add_option("--periods", periods, "number of periods (or segments)")->capture_default_str();
    integ->add_option("--t-end", t_end, "total time, required when the input is not a central configuration");
    integ->add_option("--tol-cc", io.tol.tol_cc, "central configuration residual tolerance");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error [arguments] " << e.what() << "\n";
        return kParse;
    }

    if (analyze->parsed()) {
        std::string stage = "input";
        try {
            af.tol = ao.tol;
            const std::string text = read_input(ao, in);
            stage = "analysis";
            emit(ao, analyze_json(text, af), out);
            return kOk;
        } catch (...) {
            return report_error(stage, err);
        }
    }
    if (sweep->parsed()) {
        try {
            return run_sweep(so, from, to, step, locate, samples, seed, threads, out, err);
        } catch (...) {
            return report_error("sweep", err);
        }
    }
    try {
        if (periods < 1) throw ParseError("--periods must be at least 1");
        return run_integrate(io, periods, t_end, in, out);
    } catch (...) {
        return report_error("integrate", err);
    }
}

}  // namespace vortex::cli
