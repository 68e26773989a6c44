#pragma once

#include "vortex/spectral.hpp"

#include <vector>

namespace vortex {

/// M^{-1} K grad H(z), the velocity of every vortex.
Vec vector_field(const VortexSystem& sys, const Configuration& z);

struct IntegrateOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_dt = 1e-3;
    /// Abort once any pairwise distance drops below this.
    double collision_distance = 1e-6;
    long max_steps = 2'000'000;
};

struct InvariantSample {
    double hamiltonian = 0.0;
    double impulse = 0.0;
    Point center = Point::Zero();
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Configuration> states;
    std::vector<InvariantSample> invariant_drift;
    /// max_t |H(t) - H(0)| / max(1, |H(0)|), and likewise for I.
    double max_rel_h_drift = 0.0;
    double max_rel_i_drift = 0.0;
    /// max_t |c(t) - c(0)|
    double max_center_drift = 0.0;
};

/// Raised when two vortices come closer than the collision distance. Carries
/// everything integrated up to that point.
class CollisionApproach : public NumericalError {
public:
    CollisionApproach(const std::string& what, Trajectory partial)
        : NumericalError(what), partial_(std::move(partial)) {}
    [[nodiscard]] const char* kind() const noexcept override { return "CollisionApproach"; }
    [[nodiscard]] const Trajectory& partial() const noexcept { return partial_; }

private:
    Trajectory partial_;
};

/// Adaptive Runge-Kutta-Fehlberg 7(8) integration from 0 to t_end. Every
/// accepted step is recorded.
Trajectory integrate(const VortexSystem& sys, const Configuration& z0, double t_end,
                     const IntegrateOptions& opts = {});

/// e^{-omega K t} xi.
Configuration exact_re_orbit(const CentralConfiguration& cc, double t);

struct MonodromyResult {
    double period = 0.0;
    Mat matrix;
    std::vector<cplx> multipliers;
    double determinant = 0.0;
};

/// Tolerances for the variational equation are tighter than for plain
/// trajectories: the multiplier at 1 is defective, so an integration error d
/// shows up in the multipliers as roughly sqrt(d).
struct MonodromyOptions {
    double rel_tol = 1e-13;
    double abs_tol = 1e-14;
    double initial_dt = 1e-3;
};

/// Fundamental matrix of the variational equation along the exact relative
/// equilibrium over one period 2 pi / |omega|.
MonodromyResult monodromy(const CentralConfiguration& cc, const MonodromyOptions& opts = {});

/// Largest distance after greedy nearest matching between the monodromy
/// multipliers and exp(lambda T) for lambda in sigma(B).
double floquet_vs_spectrum(const CentralConfiguration& cc, const MonodromyResult& mono);
double floquet_vs_spectrum(const CentralConfiguration& cc);

}  // namespace vortex
