#include "oracles.hpp"
#include "vortex/core_model.hpp"
#include "vortex/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace vortex;

namespace {

double max_rel(const Mat& a, const Mat& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("hamiltonian of small systems") {
    CHECK(hamiltonian({1.0, 1.0}, Configuration{{1, 0}, {-1, 0}}) == doctest::Approx(-std::log(2.0)));
    const double h = std::sqrt(3.0) / 2;
    // Side 1 equilateral triangle.
    Configuration tri{{0, 0}, {1, 0}, {0.5, h}};
    CHECK(std::abs(hamiltonian({1.0, 1.0, 1.0}, tri)) < 1e-15);
    CHECK(hamiltonian({1.0, -2.0}, Configuration{{0, 0}, {3, 4}}) == doctest::Approx(2.0 * std::log(5.0)));
}

TEST_CASE("gradient of the symmetric pair matches finite differences") {
    VortexSystem sys{1.0, 1.0};
    Configuration z{{1, 0}, {-1, 0}};
    const Vec g = grad_hamiltonian(sys, z);
    const Vec fd = oracle::fd_gradient({1.0, 1.0}, z.coords());
    CHECK((g - fd).norm() < 1e-8);
    CHECK(g[0] == doctest::Approx(-0.5));
    CHECK(g[2] == doctest::Approx(0.5));
    CHECK(std::abs(g[1]) < 1e-15);
}

TEST_CASE("hessian blocks of the symmetric pair") {
    VortexSystem sys{1.0, 1.0};
    Configuration z{{1, 0}, {-1, 0}};
    const Mat h = hessian(sys, z);
    Eigen::Matrix2d a12;
    a12 << -0.25, 0, 0, 0.25;
    CHECK((h.block<2, 2>(0, 2) - a12).norm() < 1e-15);
    CHECK((h.block<2, 2>(0, 0) + a12).norm() < 1e-15);
    CHECK((h.block<2, 2>(2, 2) + a12).norm() < 1e-15);
    const Mat fd = oracle::fd_jacobian([&](const Vec& v) { return grad_hamiltonian(sys, Configuration(v)); },
                                       z.coords());
    CHECK(max_rel(h, fd) < 1e-8);
}

TEST_CASE("structural identities on random mixed-sign systems") {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
        const auto gam = oracle::random_circulations(rng, n);
        VortexSystem sys(gam);
        Configuration z(oracle::random_positions(rng, n));
        const Vec g = grad_hamiltonian(sys, z);
        const Mat h = hessian(sys, z);
        const Mat k = poisson_matrix(static_cast<Eigen::Index>(n));
        const double L = vortex_angular_momentum(sys);
        const double gscale = g.cwiseAbs().maxCoeff() * z.coords().cwiseAbs().maxCoeff() * static_cast<double>(2 * n);
        CHECK(std::abs(g.dot(z.coords()) + L) <= 1e-12 * std::max(1.0, gscale));
        CHECK(std::abs(g.dot(apply_poisson(z.coords()))) <= 1e-12 * std::max(1.0, gscale));
        const double hs = h.cwiseAbs().maxCoeff();
        CHECK((h * k + k * h).cwiseAbs().maxCoeff() <= 1e-12 * hs);
        const Vec s = translation_vector(static_cast<Eigen::Index>(n));
        CHECK((h * s).cwiseAbs().maxCoeff() <= 1e-12 * hs);
        CHECK((h * apply_poisson(s)).cwiseAbs().maxCoeff() <= 1e-12 * hs);
        CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);

        const Vec fdg = oracle::fd_gradient(gam, z.coords());
        CHECK((g - fdg).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, g.cwiseAbs().maxCoeff()));
        const Mat fdh = oracle::fd_jacobian([&](const Vec& v) { return grad_hamiltonian(sys, Configuration(v)); },
                                            z.coords());
        CHECK(max_rel(h, fdh) <= 1e-6);
    }
}

TEST_CASE("homogeneity under scaling") {
    std::mt19937_64 rng(7);
    const auto gam = oracle::random_circulations(rng, 4);
    VortexSystem sys(gam);
    Configuration z(oracle::random_positions(rng, 4));
    for (double lam : {0.5, 2.0, 10.0}) {
        Configuration zl(Vec(lam * z.coords()));
        CHECK(hamiltonian(sys, zl) == doctest::Approx(hamiltonian(sys, z) - sys.angular_momentum() * std::log(lam)));
        CHECK((grad_hamiltonian(sys, zl) - grad_hamiltonian(sys, z) / lam).norm() < 1e-12);
        CHECK(max_rel(hessian(sys, zl), hessian(sys, z) / (lam * lam)) < 1e-12);
    }
}

TEST_CASE("angular impulse, momentum and center of vorticity") {
    CHECK(angular_impulse({1.0, 1.0}, Configuration{{1, 0}, {-1, 0}}) == doctest::Approx(1.0));
    const double h = std::sqrt(3.0) / 2;
    Configuration tri{{1, 0}, {-0.5, h}, {-0.5, -h}};
    CHECK(angular_impulse({1.0, 1.0, 1.0}, tri) == doctest::Approx(1.5));
    // Cancelling contributions: 1 * |(2,0)|^2 = 4 * |(0,1)|^2.
    CHECK(std::abs(angular_impulse({1.0, -4.0}, Configuration{{2, 0}, {0, 1}})) < 1e-15);
    CHECK(vortex_angular_momentum({1.0, 1.0}) == 1.0);
    CHECK(vortex_angular_momentum({1.0, 1.0, 1.0}) == 3.0);
    for (double m : {-0.7, 0.3, 1.0}) {
        CHECK(vortex_angular_momentum({1.0, 1.0, m, m}) == doctest::Approx(m * m + 4 * m + 1));
    }
    CHECK(center_of_vorticity({1.0, 1.0}, Configuration{{1, 0}, {-1, 0}}).norm() < 1e-15);
    CHECK(center_of_vorticity({1.0, 1.0, 1.0}, tri).norm() < 1e-15);
    const Point c = center_of_vorticity({2.0, 1.0}, Configuration{{0, 0}, {3, 0}});
    CHECK(c.x() == doctest::Approx(1.0));
    CHECK(c.y() == doctest::Approx(0.0));
}

TEST_CASE("circulation inner product and mass matrix") {
    VortexSystem pair{1.0, 1.0};
    Vec v(4);
    v << 1, 0, -1, 0;
    CHECK(circulation_inner(pair, v, v) == doctest::Approx(2.0));
    for (double m : {-0.5, 0.25, 1.0}) {
        VortexSystem rh{1.0, 1.0, m, m};
        Vec v2(8);
        v2 << m, 0, m, 0, -1, 0, -1, 0;
        CHECK(circulation_inner(rh, v2, v2) == doctest::Approx(2 * m * m + 2 * m));
    }
    std::mt19937_64 rng(99);
    const auto gam = oracle::random_circulations(rng, 5);
    VortexSystem sys(gam);
    const Vec a = Vec::Random(10), b = Vec::Random(10);
    const Mat m = mass_matrix(sys);
    CHECK(circulation_inner(sys, a, b) == doctest::Approx(b.dot(m * a)));
    CHECK(circulation_inner(sys, a, b) == doctest::Approx(circulation_inner(sys, b, a)));
    CHECK(std::abs(circulation_inner(sys, a, apply_poisson(a))) < 1e-14);
    const Mat k = poisson_matrix(5);
    CHECK((m * k - k * m).norm() == 0.0);
    CHECK((k * k + Mat::Identity(10, 10)).norm() == 0.0);
    CHECK((k.transpose() + k).norm() == 0.0);
    CHECK((apply_mass_inverse(sys, m * a) - a).norm() < 1e-14);

    const Mat m12 = mass_matrix({1.0, -2.0});
    Vec d(4);
    d << 1, 1, -2, -2;
    CHECK((m12.diagonal() - d).norm() == 0.0);
    auto c = oracle::inertia(mass_matrix({1.0, 1.0, -0.4, -0.4}));
    CHECK(c.neg == 4);
    CHECK(c.pos == 4);
}

TEST_CASE("rotation helper is the blockwise exponential") {
    Vec v = Vec::Random(6);
    const double th = 0.7;
    const Mat k = poisson_matrix(3);
    // exp(th K) via the series; K^2 = -I makes it cos I + sin K.
    const Mat e = std::cos(th) * Mat::Identity(6, 6) + std::sin(th) * k;
    CHECK((rotate(v, th) - e * v).norm() < 1e-15);
    CHECK((rotate(v, 2 * std::numbers::pi) - v).norm() < 1e-14);
}

TEST_CASE("invalid input is rejected") {
    CHECK_THROWS_AS(VortexSystem({1.0}), InvalidSystem);
    CHECK_THROWS_AS(VortexSystem({1.0, 0.0}), InvalidSystem);
    CHECK_THROWS_AS(VortexSystem({1.0, -1.0}), ZeroTotalCirculation);
    VortexSystem sys{1.0, 2.0};
    CHECK_THROWS_AS(hamiltonian(sys, Configuration{{1, 1}, {1, 1}}), CollisionError);
    CHECK_THROWS_AS(grad_hamiltonian(sys, Configuration{{0, 0}, {0, 1e-13}}), CollisionError);
    CHECK_THROWS_AS(hessian(sys, Configuration{{0, 0}, {1, 0}, {2, 0}}), InvalidSystem);
    CHECK_NOTHROW(hessian(sys, Configuration{{0, 0}, {0, 1e-6}}));
}
