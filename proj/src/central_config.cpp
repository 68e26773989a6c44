#include "vortex/central_config.hpp"

#include <Eigen/QR>

#include <cmath>
#include <numbers>
#include <sstream>

namespace vortex {

namespace {

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

CentralConfiguration finish(const VortexSystem& sys, Configuration xi, double omega, int iterations) {
    const double res = cc_residual(sys, xi, omega).norm();
    return CentralConfiguration{sys, std::move(xi), omega, res, iterations};
}

}  // namespace

const char* to_string(RhombusBranch b) noexcept { return b == RhombusBranch::A ? "A" : "B"; }

RhombusBranch parse_branch(const std::string& s) {
    if (s == "A" || s == "a") return RhombusBranch::A;
    if (s == "B" || s == "b") return RhombusBranch::B;
    throw ParameterOutOfRange("unknown rhombus branch '" + s + "' (expected A or B)");
}

Vec cc_residual(const VortexSystem& sys, const Configuration& z, double omega) {
    Vec r = grad_hamiltonian(sys, z);
    for (std::size_t i = 0; i < sys.size(); ++i) {
        r.segment<2>(static_cast<Eigen::Index>(2 * i)) += omega * sys[i] * z.point(i);
    }
    return r;
}

double omega_for(const VortexSystem& sys, const Configuration& z) {
    const double imp = angular_impulse(sys, z);
    const double floor = 1e-14 * z.coords().squaredNorm() * sys.max_abs_circulation();
    if (!(std::abs(imp) >= floor) || imp == 0.0) {
        throw ZeroAngularImpulse("angular impulse vanishes, omega = L/(2I) is undefined");
    }
    return sys.angular_momentum() / (2.0 * imp);
}

CentralConfiguration make_equilateral_triangle(double g1, double g2, double g3) {
    VortexSystem sys{g1, g2, g3};
    const double h = std::sqrt(3.0) / 2.0;
    Configuration hat{{1.0, 0.0}, {-0.5, h}, {-0.5, -h}};
    const Point c = center_of_vorticity(sys, hat);
    Vec coords = hat.coords();
    for (Eigen::Index i = 0; i < 3; ++i) {
        coords.segment<2>(2 * i) -= c;
    }
    Configuration xi(coords);
    require_admissible(sys, xi);
    const double omega = sys.total_circulation() / 3.0;
    auto out = finish(sys, std::move(xi), omega, 0);
    const double scale = std::max(1.0, grad_hamiltonian(sys, out.xi).norm());
    if (out.residual_norm > 1e-10 * scale) {
        throw ClosedFormMismatch("triangle does not satisfy the central configuration equation");
    }
    return out;
}

double rhombus_y_squared(double m, RhombusBranch branch) {
    if (!std::isfinite(m)) {
        throw ParameterOutOfRange("rhombus parameter m must be finite");
    }
    if (branch == RhombusBranch::A) {
        if (!(m > -1.0 && m <= 1.0)) {
            throw ParameterOutOfRange("branch A requires m in (-1, 1]");
        }
    } else if (!(m > -1.0 && m < 0.0)) {
        throw ParameterOutOfRange("branch B requires m in (-1, 0)");
    }
    const double beta = 3.0 * (1.0 - m);
    const double disc = beta * beta + 4.0 * m;
    if (disc < 0.0) {
        throw NegativeDiscriminant("beta^2 + 4m is negative");
    }
    const double root = std::sqrt(disc);
    // For branch B with small |m| the difference cancels; use the product of
    // the roots (y_A^2 y_B^2 = -m) instead.
    const double ya2 = 0.5 * (beta + root);
    return branch == RhombusBranch::A ? ya2 : -m / ya2;
}

CentralConfiguration make_rhombus(double m, RhombusBranch branch) {
    const double y2 = rhombus_y_squared(m, branch);
    if (m == 0.0) {
        throw ParameterOutOfRange("m = 0 gives two vortices of zero strength");
    }
    const double y = std::sqrt(y2);
    const double m_back = (3.0 * y2 - y2 * y2) / (3.0 * y2 - 1.0);
    if (rel_gap(m_back, m) > 1e-10) {
        std::ostringstream msg;
        msg << "inverse relation gives m = " << m_back << " instead of " << m;
        throw ClosedFormMismatch(msg.str());
    }
    VortexSystem sys{1.0, 1.0, m, m};
    Configuration xi{{1.0, 0.0}, {-1.0, 0.0}, {0.0, y}, {0.0, -y}};
    const double omega = 0.5 + 2.0 * m / (y2 + 1.0);
    auto out = finish(sys, std::move(xi), omega, 0);
    // Compare via 2 omega I = L so the check survives I = L = 0 at m = -2 + sqrt 3.
    const double two_w_i = 2.0 * omega * angular_impulse(sys, out.xi);
    if (std::abs(two_w_i - sys.angular_momentum()) > 1e-10 * std::max(1.0, std::abs(sys.angular_momentum()))) {
        throw ClosedFormMismatch("rhombus omega disagrees with L/(2I)");
    }
    const double scale = std::max(1.0, grad_hamiltonian(sys, out.xi).norm());
    if (out.residual_norm > 1e-10 * scale) {
        throw ClosedFormMismatch("rhombus does not satisfy the central configuration equation");
    }
    return out;
}

std::pair<double, double> rhombus_nontrivial_mus(double m, RhombusBranch branch) {
    const double y2 = rhombus_y_squared(m, branch);
    const double d = 3.0 * y2 - 1.0;
    if (std::abs(d) < 1e-12) {
        throw ParameterOutOfRange("3y^2 = 1 makes the closed forms singular");
    }
    const double p = y2 + 1.0;
    const double mu1 = (7.0 * y2 * y2 - 18.0 * y2 + 7.0) / (2.0 * p * d);
    const double mu2 = 2.0 * (m + 1.0) * (1.0 - y2) / (p * p);
    const double y = std::sqrt(y2);
    const double alt = 2.0 * (y2 - 1.0) * (y2 + 2.0 * y - 1.0) * (y2 - 2.0 * y - 1.0) / (p * p * d);
    if (std::abs(alt - mu2) > 1e-10 * std::max(1.0, std::abs(mu2))) {
        throw ClosedFormMismatch("the two closed forms for mu2 disagree");
    }
    return {mu1, mu2};
}

CentralConfiguration find_cc(const VortexSystem& sys, const Configuration& guess, const FindCcOptions& opts) {
    require_admissible(sys, guess);
    const Eigen::Index n2 = sys.dim();
    const Eigen::Index rows = n2 + 4;
    const Eigen::Index cols = n2 + 1;

    const double i0 = angular_impulse(sys, guess);
    const Mat mass = mass_matrix(sys);
    const Vec diag = mass.diagonal();
    const Vec phase = diag.cwiseProduct(apply_poisson(guess.coords()));

    auto residual = [&](const Vec& z, double om) {
        Configuration c(z);
        Vec f(rows);
        f.head(n2) = cc_residual(sys, c, om);
        f[n2] = angular_impulse(sys, c) - i0;
        f[n2 + 1] = phase.dot(z);
        const Point cv = center_of_vorticity(sys, c) * sys.total_circulation();
        f[n2 + 2] = cv.x();
        f[n2 + 3] = cv.y();
        return f;
    };

    Vec z = guess.coords();
    double om = omega_for(sys, guess);
    Vec f = residual(z, om);
    double fn = f.norm();
    int it = 0;
    // The reported residual uses omega = L/(2I) rather than the Newton
    // unknown, so both have to be below tolerance before stopping.
    auto reported = [&](const Vec& zz) {
        const Configuration c(zz);
        try {
            return cc_residual(sys, c, omega_for(sys, c)).norm();
        } catch (const ZeroAngularImpulse&) {
            return 0.0;
        }
    };

    while (fn > opts.tol || reported(z) > opts.tol) {
        if (it >= opts.max_iter) {
            throw NoConvergence("central configuration solver did not converge in " + std::to_string(opts.max_iter) +
                                    " iterations",
                                Configuration(z), om, fn);
        }
        Configuration c(z);
        Mat jac = Mat::Zero(rows, cols);
        jac.topLeftCorner(n2, n2) = hessian(sys, c) + om * mass;
        const Vec mz = diag.cwiseProduct(z);
        jac.block(0, n2, n2, 1) = mz;
        jac.block(n2, 0, 1, n2) = mz.transpose();
        jac.block(n2 + 1, 0, 1, n2) = phase.transpose();
        for (std::size_t i = 0; i < sys.size(); ++i) {
            jac(n2 + 2, static_cast<Eigen::Index>(2 * i)) = sys[i];
            jac(n2 + 3, static_cast<Eigen::Index>(2 * i + 1)) = sys[i];
        }

        Eigen::CompleteOrthogonalDecomposition<Mat> cod(jac);
        cod.setThreshold(opts.rank_tol);
        if (cod.rank() < cols) {
            throw SingularJacobian("augmented Jacobian is rank deficient; the configuration is close to a degenerate "
                                   "critical point");
        }
        const Vec step = cod.solve(-f);

        double t = 1.0;
        bool accepted = false;
        bool collided = false;
        for (int h = 0; h <= opts.max_halvings; ++h, t *= 0.5) {
            const Vec zt = z + t * step.head(n2);
            const double omt = om + t * step[n2];
            Configuration ct(zt);
            if (!(ct.min_pair_distance() > kCollisionEpsilon)) {
                collided = true;
                continue;
            }
            collided = false;
            const Vec ft = residual(zt, omt);
            const double ftn = ft.norm();
            if (ftn < fn) {
                z = zt;
                om = omt;
                f = ft;
                fn = ftn;
                accepted = true;
                break;
            }
        }
        ++it;
        if (!accepted) {
            // Already converged in the augmented sense; keep the iterate.
            if (fn <= opts.tol) break;
            if (collided) {
                throw CollisionError("every damped Newton step leads to a collision");
            }
            // No decrease at any step length: rounding floor above tol, or a
            // spurious local minimum of |F|.
            throw NoConvergence("damped Newton step failed to decrease the residual", Configuration(z), om, fn);
        }
    }

    Configuration xi(z);
    // Report omega from L/(2I); at a solution it coincides with the Newton unknown.
    double omega = om;
    try {
        omega = omega_for(sys, xi);
    } catch (const ZeroAngularImpulse&) {
    }
    return finish(sys, std::move(xi), omega, it);
}

CcValidation validate_cc(const VortexSystem& sys, const Configuration& z, double tol) {
    require_admissible(sys, z);
    CcValidation v;
    v.omega = omega_for(sys, z);
    const Vec g = grad_hamiltonian(sys, z);
    v.residual = cc_residual(sys, z, v.omega).norm() / std::max(1.0, g.norm());
    v.center_offset = center_of_vorticity(sys, z).norm();
    v.is_cc = v.residual <= tol && v.center_offset <= tol;
    return v;
}

}  // namespace vortex
