#pragma once

#include "vortex/core_model.hpp"
#include "vortex/errors.hpp"

#include <string>
#include <utility>

namespace vortex {

/// A central configuration xi (center of vorticity at the origin) together
/// with its angular velocity and the absolute norm of grad H + omega M xi.
struct CentralConfiguration {
    VortexSystem system;
    Configuration xi;
    double omega = 0.0;
    double residual_norm = 0.0;
    /// Newton steps used by find_cc; zero for the closed-form generators.
    int iterations = 0;
};

/// Selects the sign in y^2 = (beta +- sqrt(beta^2 + 4m)) / 2.
enum class RhombusBranch { A, B };

[[nodiscard]] const char* to_string(RhombusBranch b) noexcept;
/// Accepts "A"/"a"/"B"/"b"; throws ParameterOutOfRange otherwise.
[[nodiscard]] RhombusBranch parse_branch(const std::string& s);

Vec cc_residual(const VortexSystem& sys, const Configuration& z, double omega);

/// L / (2 I(z)). Throws ZeroAngularImpulse when |I| < 1e-14 |z|^2 max|G|.
double omega_for(const VortexSystem& sys, const Configuration& z);

/// Vertices (1,0), (-1/2, sqrt3/2), (-1/2, -sqrt3/2) shifted so the center of
/// vorticity sits at the origin. omega = (g1 + g2 + g3) / 3.
CentralConfiguration make_equilateral_triangle(double g1, double g2, double g3);

/// Squared half-diagonal y^2 on the chosen branch.
double rhombus_y_squared(double m, RhombusBranch branch);

/// Circulations (1, 1, m, m) at (1,0), (-1,0), (0,y), (0,-y).
CentralConfiguration make_rhombus(double m, RhombusBranch branch);

/// Closed-form nontrivial eigenvalues (mu1, mu2) of M^{-1} D^2H for the rhombus.
std::pair<double, double> rhombus_nontrivial_mus(double m, RhombusBranch branch);

struct FindCcOptions {
    int max_iter = 50;
    double tol = 1e-12;
    int max_halvings = 30;
    /// Relative singular-value threshold for declaring the Jacobian singular.
    double rank_tol = 1e-13;
};

/// Raised by find_cc when the iteration budget is exhausted.
class NoConvergence : public NumericalError {
public:
    NoConvergence(const std::string& what, Configuration best, double omega, double residual)
        : NumericalError(what), best_(std::move(best)), omega_(omega), residual_(residual) {}
    [[nodiscard]] const char* kind() const noexcept override { return "NoConvergence"; }
    [[nodiscard]] const Configuration& best_iterate() const noexcept { return best_; }
    [[nodiscard]] double best_omega() const noexcept { return omega_; }
    [[nodiscard]] double best_residual() const noexcept { return residual_; }

private:
    Configuration best_;
    double omega_;
    double residual_;
};

/// Damped Newton / least-squares iteration on
///   grad H(z) + omega M z = 0,  I(z) = I(guess),  <M K guess, z> = 0,  sum G_i z_i = 0.
CentralConfiguration find_cc(const VortexSystem& sys, const Configuration& guess, const FindCcOptions& opts = {});

struct CcValidation {
    bool is_cc = false;
    double omega = 0.0;
    /// |grad H + omega M z| / max(1, |grad H|)
    double residual = 0.0;
    double center_offset = 0.0;
};

CcValidation validate_cc(const VortexSystem& sys, const Configuration& z, double tol = 1e-8);

}  // namespace vortex
