#include "oracles.hpp"
#include "vortex/inertia.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace vortex;

namespace {

/// Five-vortex relative equilibrium whose M^{-1} D^2H has a complex quartet.
CentralConfiguration quartet_fixture() {
    VortexSystem sys({-1.0709464121171075, 0.5278708853201801, -0.9852920769601197, -0.6458739091494543,
                      -0.7459326787511442});
    Vec z(10);
    z << 0.8641921288834609, 0.7430596436701303, -0.047326008441230465, -0.013894859205692086,
        -0.8281409647548192, -0.8581882901468095, 0.42492027482033634, -0.520863547372256, -0.5482661924168188,
        0.5079098396960305;
    return find_cc(sys, Configuration(z));
}

InertiaTriple triple(int a, int b, int c) { return InertiaTriple{a, b, c}; }

}  // namespace

TEST_CASE("inertia counts") {
    Mat d = Vec((Vec(3) << 1, -2, 0).finished()).asDiagonal();
    CHECK(inertia_of(d) == triple(1, 1, 1));
    CHECK(inertia_of(mass_matrix({1.0, 1.0, -0.3, -0.3})) == triple(4, 0, 4));
    CHECK(inertia_of(a_hat(make_equilateral_triangle(1, 1, 1))) == triple(0, 1, 5));
    Mat ns(2, 2);
    ns << 1, 2, 0, 1;
    CHECK_THROWS_AS(inertia_of(ns), NotSymmetric);

    std::mt19937_64 rng(11);
    for (int k = 0; k < 10; ++k) {
        Mat a = Mat::Random(6, 6);
        a = (a + a.transpose()).eval();
        const auto o = oracle::inertia(a);
        CHECK(inertia_of(a) == triple(o.neg, o.zero, o.pos));
    }
}

TEST_CASE("restricted inertia") {
    for (const auto& cc : {make_equilateral_triangle(1, 1, 1), make_rhombus(0.5, RhombusBranch::A),
                           make_rhombus(-0.5, RhombusBranch::B), make_equilateral_triangle(1, 1, -0.4)}) {
        const Vec xi = cc.xi.coords();
        const Vec kxi = apply_poisson(xi);
        Mat w(xi.size(), 2);
        w << xi, kxi;
        const Mat ah = a_hat(cc);
        const double mxx = circulation_inner(cc.system, xi, xi);
        const Mat gram = w.transpose() * ah * w;
        // Gram of A-hat on (xi, K xi) is diag(2 omega <M xi, xi> |xi|-scaled, 0).
        CHECK(gram(0, 0) == doctest::Approx(2 * cc.omega * mxx).epsilon(1e-10));
        CHECK(std::abs(gram(0, 1)) <= 1e-8);
        CHECK(std::abs(gram(1, 1)) <= 1e-8);
        const auto rw = restricted_inertia(ah, w);
        if (cc.omega * mxx > 0) {
            CHECK(rw == triple(0, 1, 1));
        } else {
            CHECK(rw == triple(1, 1, 0));
        }
        const auto mw = restricted_inertia(mass_matrix(cc.system), w);
        CHECK(mw == (mxx > 0 ? triple(0, 0, 2) : triple(2, 0, 0)));
    }
    std::mt19937_64 rng(4);
    const Mat basis = Mat::Random(7, 3);
    CHECK(restricted_inertia(Mat::Identity(7, 7), basis) == triple(0, 0, 3));

    // Sylvester: any basis of the same subspace gives the same answer.
    const auto cc = quartet_fixture();
    const Mat ah = a_hat(cc);
    const Mat wp = w_perp_basis(cc);
    const auto ref = restricted_inertia(ah, wp);
    for (int k = 0; k < 5; ++k) {
        Mat t = Mat::Random(wp.cols(), wp.cols()) + 3 * Mat::Identity(wp.cols(), wp.cols());
        CHECK(restricted_inertia(ah, wp * t) == ref);
    }
    Mat dep(7, 2);
    dep << basis.col(0), 2 * basis.col(0);
    CHECK_THROWS_AS(restricted_inertia(Mat::Identity(7, 7), dep), RankDeficientBasis);
}

TEST_CASE("generalized eigenspaces of the pencil") {
    const auto t = make_equilateral_triangle(1, 1, 1);
    const auto dec = generalized_eigenspaces(a_gamma(t));
    int total = 0;
    bool has_two_omega = false, has_zero = false;
    for (const auto& c : dec.clusters) {
        total += c.algebraic;
        if (std::abs(c.nu - 2 * t.omega) < 1e-8) has_two_omega = true;
        if (std::abs(c.nu) < 1e-8) has_zero = true;
    }
    CHECK(total == 6);
    CHECK(has_two_omega);
    CHECK(has_zero);

    // At m = 1 the eigenvalue omega of a_gamma carries s, Ks and the mu2 = 0 pair.
    const auto sq = make_rhombus(1.0, RhombusBranch::A);
    const auto ds = generalized_eigenspaces(a_gamma(sq));
    bool found = false;
    for (const auto& c : ds.clusters) {
        if (std::abs(c.nu - sq.omega) < 1e-8) {
            found = true;
            CHECK(c.algebraic == 4);
            CHECK(c.geometric == 4);
        }
    }
    CHECK(found);

    for (const auto& cc : {t, sq, make_equilateral_triangle(1, 1, -0.4), make_rhombus(-0.5, RhombusBranch::B),
                           quartet_fixture()}) {
        const auto d = generalized_eigenspaces(a_gamma(cc));
        for (const auto& c : d.clusters) {
            bool mirrored = false;
            for (const auto& o : d.clusters) {
                if (std::abs(o.nu - (2 * cc.omega - c.nu)) < 1e-6 && o.algebraic == c.algebraic) mirrored = true;
            }
            CHECK(mirrored);
            if (!c.is_real()) {
                bool conj = false;
                for (const auto& o : d.clusters)
                    if (std::abs(o.nu - std::conj(c.nu)) < 1e-6 && o.algebraic == c.algebraic) conj = true;
                CHECK(conj);
            }
            // Basis vectors lie in the kernel of (A - nu)^m.
            const CMat a = a_gamma(cc).cast<cplx>();
            CMat p = CMat::Identity(a.rows(), a.cols());
            for (int k = 0; k < c.algebraic; ++k) p = p * (a - c.nu * CMat::Identity(a.rows(), a.cols()));
            CHECK((p * c.basis).norm() <= 1e-6 * std::max(1.0, p.norm()));
        }
        CHECK(m_orthogonality_check(cc.system, d) <= 1e-8);
    }
}

TEST_CASE("Jordan structure on the symmetry plane") {
    // K a_gamma restricted to W is nilpotent, so B has a Jordan block at 0.
    const auto t = make_equilateral_triangle(1, 1, 1);
    const auto d = generalized_eigenspaces(stability_matrix(t));
    bool found = false;
    for (const auto& c : d.clusters) {
        if (std::abs(c.nu) < 1e-6) {
            found = true;
            CHECK(c.algebraic == 2);
            CHECK(c.geometric == 1);
            CHECK(c.jordan_depth == 2);
        }
    }
    CHECK(found);
}

TEST_CASE("restricted inertia on I_nu") {
    const auto sq = make_rhombus(1.0, RhombusBranch::A);
    const auto s = i_nu_inertia(sq, generalized_eigenspaces(a_gamma(sq)));
    for (const auto& e : s.entries) {
        if (std::abs(e.nu) < 1e-8) CHECK(e.inertia == triple(0, 1, 0));
        if (std::abs(e.nu - sq.omega) < 1e-8) CHECK(e.inertia == triple(0, 0, 4));
        if (std::abs(e.nu - 2 * sq.omega) < 1e-8) CHECK(e.inertia == triple(0, 0, 1));
    }
    CHECK(s.additivity_holds);
    CHECK(s.total == s.direct);

    // <A-hat s, s> = omega <M s, s> = omega (2 + 2m) on the translation plane.
    for (double m : {-0.5, 0.3, 1.0}) {
        const auto r = make_rhombus(m, RhombusBranch::A);
        const Vec sv = translation_vector(4);
        CHECK(sv.dot(a_hat(r) * sv) == doctest::Approx(r.omega * (2 + 2 * m)));
    }

    const auto q = quartet_fixture();
    const auto dq = generalized_eigenspaces(a_gamma(q));
    const auto sq5 = i_nu_inertia(q, dq);
    int complex_pairs = 0;
    for (const auto& e : sq5.entries) {
        if (e.complex_pair) {
            ++complex_pairs;
            CHECK(e.inertia.n_minus == e.multiplicity);
            CHECK(e.inertia.n_plus == e.multiplicity);
        }
    }
    CHECK(complex_pairs >= 1);
    CHECK(sq5.complex_lemma_holds);
    CHECK(sq5.additivity_holds);

    const auto tri = make_equilateral_triangle(1, 1, -0.4);
    const auto st = i_nu_inertia(tri, generalized_eigenspaces(a_gamma(tri)));
    CHECK(st.additivity_holds);
    for (const auto& e : st.entries) {
        if (std::abs(e.nu - 2 * tri.omega) < 1e-8) {
            const double sign = tri.omega * circulation_inner(tri.system, tri.xi.coords(), tri.xi.coords());
            CHECK(e.inertia == (sign > 0 ? triple(0, 0, 1) : triple(1, 0, 0)));
        }
    }
}

TEST_CASE("index theorem checks") {
    const auto t = check_theorem_b(make_equilateral_triangle(1, 1, 1));
    CHECK(t.verdict == TheoremBVerdict::Holds);
    CHECK(t.inertia_ahat.n_minus == 0);
    CHECK(t.predicted_n_minus == 0);
    CHECK(t.m_xi_xi == doctest::Approx(3.0));

    const auto r = check_theorem_b(make_rhombus(0.5, RhombusBranch::A));
    CHECK(r.verdict == TheoremBVerdict::Holds);
    CHECK(r.inertia_ahat.n_minus == 0);

    const auto b = check_theorem_b(make_rhombus(-0.5, RhombusBranch::B));
    CHECK(b.verdict == TheoremBVerdict::NotApplicable);
    CHECK(b.classification == StabilityClass::Unstable);

    // Mixed-sign stable triangle: direct count equals n-(M), not n-(M) - 1.
    const auto m = check_theorem_b(make_equilateral_triangle(1, 1, -0.4));
    CHECK(m.verdict == TheoremBVerdict::Holds);
    CHECK(m.inertia_ahat.n_minus == 2);
    CHECK(m.inertia_m.n_minus == 2);

    const auto a01 = check_theorem_b(make_rhombus(-0.1, RhombusBranch::A));
    CHECK(a01.verdict == TheoremBVerdict::Holds);
    CHECK(a01.inertia_ahat.n_minus == 4);

    CHECK_THROWS_AS(check_theorem_b(make_rhombus(-2 + std::sqrt(3.0), RhombusBranch::A)), IndefiniteSignXi);
}

TEST_CASE("positive circulations: linear stability and the restricted pencil") {
    std::vector<CentralConfiguration> ccs{make_equilateral_triangle(1, 1, 1)};
    for (double m : {0.1, 0.4, 0.7, 1.0}) ccs.push_back(make_rhombus(m, RhombusBranch::A));
    for (const auto& cc : ccs) {
        const auto rep = check_theorem_b(cc);
        CHECK(rep.classification == StabilityClass::LinearlyStable);
        CHECK(rep.inertia_ahat_wperp.n_minus == 0);
        CHECK(rep.inertia_ahat_wperp.n_zero == 0);
    }
}
