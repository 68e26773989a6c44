#include "oracles.hpp"
#include "vortex/central_config.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace vortex;

namespace {

std::vector<double> sorted_distances(const Configuration& z) {
    std::vector<double> d;
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j) d.push_back(z.distance(i, j));
    std::sort(d.begin(), d.end());
    return d;
}

Vec mass_xi(const CentralConfiguration& cc) { return mass_matrix(cc.system) * cc.xi.coords(); }

}  // namespace

TEST_CASE("residual of known central configurations") {
    VortexSystem pair{1.0, 1.0};
    Configuration z{{1, 0}, {-1, 0}};
    CHECK(cc_residual(pair, z, 0.5).norm() < 1e-15);
    CHECK(omega_for(pair, z) == doctest::Approx(0.5));

    const auto tri = make_equilateral_triangle(1, 1, 1);
    CHECK(cc_residual(tri.system, tri.xi, 1.0).norm() < 1e-14);
    CHECK(omega_for(tri.system, tri.xi) == doctest::Approx(1.0));
    for (double wrong : {0.7, 1.3, -2.0}) {
        const double expect = std::abs(wrong - 1.0) * mass_xi(tri).norm();
        CHECK(cc_residual(tri.system, tri.xi, wrong).norm() == doctest::Approx(expect));
    }
}

TEST_CASE("equilateral triangle generator") {
    const auto t1 = make_equilateral_triangle(1, 1, 1);
    CHECK(t1.omega == doctest::Approx(1.0));
    CHECK((t1.xi.point(0) - Point(1, 0)).norm() < 1e-15);

    const auto t2 = make_equilateral_triangle(1, 1, -0.4);
    CHECK(t2.omega == doctest::Approx(1.6 / 3));
    CHECK(t2.residual_norm <= 1e-10);
    CHECK(center_of_vorticity(t2.system, t2.xi).norm() < 1e-14);
    CHECK(omega_for(t2.system, t2.xi) == doctest::Approx(t2.omega).epsilon(1e-12));

    const auto t3 = make_equilateral_triangle(2, 2, 2);
    CHECK(t3.omega == doctest::Approx(2.0));
    CHECK((t3.xi.coords() - t1.xi.coords()).norm() < 1e-15);

    std::mt19937_64 rng(1);
    for (int k = 0; k < 20; ++k) {
        const auto g = oracle::random_circulations(rng, 3);
        const auto t = make_equilateral_triangle(g[0], g[1], g[2]);
        const double L = t.system.angular_momentum();
        if (std::abs(L) < 1e-3) continue;
        // <M xi, xi> = 3 L / Gamma for the recentered triangle.
        CHECK(circulation_inner(t.system, t.xi.coords(), t.xi.coords()) ==
              doctest::Approx(3 * L / t.system.total_circulation()).epsilon(1e-10));
        CHECK(validate_cc(t.system, t.xi).is_cc);
        const double d0 = t.xi.distance(0, 1);
        CHECK(t.xi.distance(1, 2) == doctest::Approx(d0));
        CHECK(t.xi.distance(0, 2) == doctest::Approx(d0));
    }
    CHECK_THROWS_AS(make_equilateral_triangle(1, 1, -2), ZeroTotalCirculation);
}

TEST_CASE("rhombus generator") {
    const auto sq = make_rhombus(1.0, RhombusBranch::A);
    CHECK(sq.xi.point(2).y() == doctest::Approx(1.0));
    CHECK(sq.omega == doctest::Approx(1.5));
    CHECK(rhombus_y_squared(1e-9, RhombusBranch::A) == doctest::Approx(3.0).epsilon(1e-8));

    const auto b = make_rhombus(-0.5, RhombusBranch::B);
    CHECK(rhombus_y_squared(-0.5, RhombusBranch::B) == doctest::Approx(0.5 * (4.5 - std::sqrt(18.25))));
    CHECK(b.omega < 0);
    const auto vb = validate_cc(b.system, b.xi);
    CHECK(vb.is_cc);
    CHECK(vb.residual <= 1e-10);
    CHECK(vb.omega < 0);

    for (auto br : {RhombusBranch::A, RhombusBranch::B}) {
        for (int k = 1; k < 40; ++k) {
            const double m = br == RhombusBranch::A ? -1.0 + k * 0.05 : -1.0 + k * 0.025;
            if ((br == RhombusBranch::B && m >= 0) || std::abs(m) < 1e-9) continue;
            const auto r = make_rhombus(m, br);
            const double y2 = rhombus_y_squared(m, br);
            CHECK((3 * y2 - y2 * y2) / (3 * y2 - 1) == doctest::Approx(m).epsilon(1e-10));
            CHECK(r.omega == doctest::Approx((m * m + 4 * m + 1) / (2 * (1 + m * y2))).epsilon(1e-12));
            const auto v = validate_cc(r.system, r.xi, 1e-8);
            CHECK(v.is_cc);
            CHECK(r.residual_norm <= 1e-10);
        }
    }
    // Branch B rotates backwards exactly on (-1, -2 + sqrt 3); branch A never does.
    CHECK(make_rhombus(-0.3, RhombusBranch::B).omega < 0);
    CHECK(make_rhombus(-0.2, RhombusBranch::B).omega > 0);
    for (double m : {-0.95, -0.5, -0.27, -0.2, 0.5}) CHECK(make_rhombus(m, RhombusBranch::A).omega > 0);
    // At m = -2 + sqrt 3 both L and I vanish on branch A.
    const auto crit = make_rhombus(-2 + std::sqrt(3.0), RhombusBranch::A);
    CHECK(std::abs(crit.system.angular_momentum()) < 1e-14);
    CHECK(std::abs(angular_impulse(crit.system, crit.xi)) < 1e-14);
    CHECK(crit.residual_norm < 1e-12);

    CHECK_THROWS_AS(make_rhombus(0.1, RhombusBranch::B), ParameterOutOfRange);
    CHECK_THROWS_AS(make_rhombus(0.0, RhombusBranch::B), ParameterOutOfRange);
    CHECK_THROWS_AS(make_rhombus(-1.0, RhombusBranch::A), ParameterOutOfRange);
    CHECK_THROWS_AS(make_rhombus(1.2, RhombusBranch::A), ParameterOutOfRange);
    CHECK(parse_branch("b") == RhombusBranch::B);
    CHECK_THROWS_AS((void)parse_branch("C"), ParameterOutOfRange);
}

TEST_CASE("rhombus closed-form mus against an eigen-oracle") {
    auto [m1, m2] = rhombus_nontrivial_mus(1.0, RhombusBranch::A);
    CHECK(m1 == doctest::Approx(-0.5));
    CHECK(std::abs(m2) < 1e-15);

    for (auto br : {RhombusBranch::A, RhombusBranch::B}) {
        for (double m : {-0.9, -0.6, -0.3, -0.1, 0.2, 0.5, 0.9}) {
            if (br == RhombusBranch::B && m >= 0) continue;
            const auto r = make_rhombus(m, br);
            const auto [mu1, mu2] = rhombus_nontrivial_mus(m, br);
            Mat g = hessian(r.system, r.xi);
            for (int i = 0; i < 8; ++i) g.row(i) /= r.system[static_cast<std::size_t>(i / 2)];
            Eigen::EigenSolver<Mat> es(g);
            auto near = [&](double target) {
                double best = INFINITY;
                for (int i = 0; i < 8; ++i) best = std::min(best, std::abs(es.eigenvalues()[i] - target));
                return best;
            };
            CHECK(near(mu1) < 1e-8);
            CHECK(near(mu2) < 1e-8);
            CHECK(near(-mu1) < 1e-8);
            CHECK(near(r.omega) < 1e-8);
        }
    }
}

TEST_CASE("covariance of central configurations") {
    const auto r = make_rhombus(0.4, RhombusBranch::A);
    for (double lam : {0.5, 2.0, 10.0}) {
        Configuration z(Vec(lam * r.xi.coords()));
        const auto v = validate_cc(r.system, z);
        CHECK(v.is_cc);
        CHECK(v.omega == doctest::Approx(r.omega / (lam * lam)).epsilon(1e-12));
    }
    for (double th : {std::numbers::pi / 7, std::numbers::pi / 2}) {
        Configuration z(rotate(r.xi.coords(), th));
        const auto v = validate_cc(r.system, z);
        CHECK(v.is_cc);
        CHECK(v.omega == doctest::Approx(r.omega).epsilon(1e-12));
    }
}

TEST_CASE("Newton solver") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> nd(0.0, 1e-3);
    const auto tri = make_equilateral_triangle(1, 1, 1);
    for (int k = 0; k < 5; ++k) {
        Vec g = tri.xi.coords();
        for (auto& x : g) x += nd(rng);
        const auto cc = find_cc(tri.system, Configuration(g));
        CHECK(cc.residual_norm <= 1e-12);
        const auto d = sorted_distances(cc.xi);
        CHECK(d.back() - d.front() < 1e-10);
        CHECK(cc.omega == doctest::Approx(omega_for(tri.system, cc.xi)));
        CHECK(center_of_vorticity(tri.system, cc.xi).norm() < 1e-12);
    }

    const auto rh = make_rhombus(0.5, RhombusBranch::A);
    const auto fixed = find_cc(rh.system, rh.xi);
    CHECK(fixed.iterations <= 2);
    CHECK((fixed.xi.coords() - rh.xi.coords()).norm() < 1e-12);

    VortexSystem pair{1.0, 1.0};
    const auto p = find_cc(pair, Configuration{{3, 0}, {-3, 0}});
    CHECK(p.omega == doctest::Approx(1.0 / 18.0));
    CHECK(angular_impulse(pair, p.xi) == doctest::Approx(9.0));

    // An asymmetric pair guess still lands on the two-vortex relative equilibrium.
    VortexSystem ab{2.0, -0.5};
    const auto q = find_cc(ab, Configuration{{0.3, 0.1}, {1.5, -0.2}});
    CHECK(validate_cc(ab, q.xi).is_cc);

    CHECK_THROWS_AS(find_cc(pair, Configuration{{1, 0}, {1, 0}}), CollisionError);
}

TEST_CASE("validation rejects non-critical configurations") {
    std::mt19937_64 rng(5);
    VortexSystem sys{1.0, 0.5, 2.0, 1.0};
    const auto v = validate_cc(sys, Configuration(oracle::random_positions(rng, 4)));
    CHECK_FALSE(v.is_cc);
    CHECK(v.residual > 1e-3);
    const auto t = validate_cc({1.0, 1.0, 1.0}, make_equilateral_triangle(1, 1, 1).xi);
    CHECK(t.is_cc);
    CHECK(t.omega == doctest::Approx(1.0));
    CHECK(t.residual <= 1e-12);
    CHECK_THROWS_AS(validate_cc({1.0, -0.5}, Configuration{{1, 0}, {std::sqrt(2.0), 0}}), ZeroAngularImpulse);
}
