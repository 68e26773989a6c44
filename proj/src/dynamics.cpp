#include "vortex/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace vortex {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<double>;
using Stepper = odeint::runge_kutta_fehlberg78<State>;

/// Row-wise K then M^{-1}: (M^{-1} K X) for a matrix or vector X.
template <class Derived>
void left_multiply_minv_k(const VortexSystem& sys, Eigen::MatrixBase<Derived>& x) {
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(2 * i);
        const double inv = 1.0 / sys[i];
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            const double a = x(r, c);
            const double b = x(r + 1, c);
            x(r, c) = inv * b;
            x(r + 1, c) = -inv * a;
        }
    }
}

InvariantSample sample(const VortexSystem& sys, const Configuration& z) {
    return {hamiltonian(sys, z), angular_impulse(sys, z), center_of_vorticity(sys, z)};
}

/// Drives a controlled stepper from t0 to t_end, calling `on_step` after
/// every accepted step. Throws StepFailure if the step size collapses.
template <class System, class OnStep>
void drive(System&& rhs, State& x, double t_end, double rel, double abs, double dt0, long max_steps,
           OnStep&& on_step) {
    auto ctrl = odeint::make_controlled<Stepper>(abs, rel);
    double t = 0.0;
    double dt = std::min(dt0, t_end);
    long steps = 0;
    while (t < t_end) {
        const double remaining = t_end - t;
        double trial = std::min(dt, remaining);
        const bool clamped = trial < dt;
        const double before = t;
        const auto result = ctrl.try_step(rhs, x, t, trial);
        if (result == odeint::success) {
            // A clamped final step should not shrink the next suggestion.
            dt = clamped ? std::max(dt, trial) : trial;
            if (t_end - t <= 4.0 * std::numeric_limits<double>::epsilon() * t_end) t = t_end;
            on_step(t, x);
            if (++steps > max_steps) {
                throw StepFailure("step budget exhausted before reaching the final time");
            }
        } else {
            dt = trial;
            t = before;
        }
        if (dt < 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            std::ostringstream msg;
            msg << "step size collapsed to " << dt << " at t = " << t;
            throw StepFailure(msg.str());
        }
    }
}

}  // namespace

Vec vector_field(const VortexSystem& sys, const Configuration& z) {
    Vec v = grad_hamiltonian(sys, z);
    left_multiply_minv_k(sys, v);
    return v;
}

Trajectory integrate(const VortexSystem& sys, const Configuration& z0, double t_end, const IntegrateOptions& opts) {
    require_admissible(sys, z0);
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw ParameterOutOfRange("integration end time must be positive and finite");
    }
    if (z0.min_pair_distance() < opts.collision_distance) {
        throw CollisionApproach("initial configuration is already within the collision distance", {});
    }
    const std::size_t n = sys.size();
    const auto n2 = static_cast<std::size_t>(sys.dim());

    auto rhs = [&](const State& x, State& dx, double) {
        std::fill(dx.begin(), dx.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double ex = x[2 * i] - x[2 * j];
                const double ey = x[2 * i + 1] - x[2 * j + 1];
                const double f = 1.0 / (ex * ex + ey * ey);
                // grad_i H = -G_i G_j e / r^2; velocity_i = M^{-1} K grad_i H.
                const double gi = -sys[j] * f;
                const double gj = sys[i] * f;
                dx[2 * i] += gi * ey;
                dx[2 * i + 1] -= gi * ex;
                dx[2 * j] += gj * ey;
                dx[2 * j + 1] -= gj * ex;
            }
        }
    };

    Trajectory tr;
    tr.times.push_back(0.0);
    tr.states.push_back(z0);
    const InvariantSample s0 = sample(sys, z0);
    tr.invariant_drift.push_back(s0);
    const double h_scale = std::max(1.0, std::abs(s0.hamiltonian));
    const double i_scale = std::max(1.0, std::abs(s0.impulse));

    State x(z0.coords().data(), z0.coords().data() + n2);
    drive(rhs, x, t_end, opts.rel_tol, opts.abs_tol, opts.initial_dt, opts.max_steps, [&](double t, const State& y) {
        Configuration z(Eigen::Map<const Vec>(y.data(), static_cast<Eigen::Index>(n2)));
        const double dmin = z.min_pair_distance();
        tr.times.push_back(t);
        tr.states.push_back(z);
        if (dmin < opts.collision_distance) {
            std::ostringstream msg;
            msg << "vortices approach collision (distance " << dmin << ") at t = " << t;
            throw CollisionApproach(msg.str(), tr);
        }
        const InvariantSample s = sample(sys, z);
        tr.invariant_drift.push_back(s);
        tr.max_rel_h_drift = std::max(tr.max_rel_h_drift, std::abs(s.hamiltonian - s0.hamiltonian) / h_scale);
        tr.max_rel_i_drift = std::max(tr.max_rel_i_drift, std::abs(s.impulse - s0.impulse) / i_scale);
        tr.max_center_drift = std::max(tr.max_center_drift, (s.center - s0.center).norm());
    });
    return tr;
}

Configuration exact_re_orbit(const CentralConfiguration& cc, double t) {
    return Configuration(rotate(cc.xi.coords(), -cc.omega * t));
}

MonodromyResult monodromy(const CentralConfiguration& cc, const MonodromyOptions& opts) {
    if (cc.omega == 0.0) {
        throw ParameterOutOfRange("a non-rotating configuration has no period");
    }
    const auto& sys = cc.system;
    const Eigen::Index n2 = sys.dim();
    MonodromyResult out;
    out.period = 2.0 * std::numbers::pi / std::abs(cc.omega);

    Mat d(n2, n2);
    auto rhs = [&](const State& x, State& dx, double t) {
        d = hessian(sys, exact_re_orbit(cc, t));
        left_multiply_minv_k(sys, d);
        Eigen::Map<const Mat> phi(x.data(), n2, n2);
        Eigen::Map<Mat> dphi(dx.data(), n2, n2);
        dphi.noalias() = d * phi;
    };
    State x(static_cast<std::size_t>(n2 * n2), 0.0);
    Eigen::Map<Mat>(x.data(), n2, n2).setIdentity();
    drive(rhs, x, out.period, opts.rel_tol, opts.abs_tol, opts.initial_dt, 50'000'000, [](double, const State&) {});

    out.matrix = Eigen::Map<const Mat>(x.data(), n2, n2);
    out.multipliers = sorted_eigenvalues(out.matrix);
    out.determinant = out.matrix.determinant();
    return out;
}

double floquet_vs_spectrum(const CentralConfiguration& cc, const MonodromyResult& mono) {
    std::vector<cplx> predicted;
    for (const auto& l : sorted_eigenvalues(stability_matrix(cc))) predicted.push_back(std::exp(l * mono.period));
    std::vector<cplx> computed = mono.multipliers;
    if (predicted.size() != computed.size()) return std::numeric_limits<double>::infinity();

    // Repeatedly take the globally closest remaining pair.
    double worst = 0.0;
    std::vector<bool> used_p(predicted.size(), false), used_c(computed.size(), false);
    for (std::size_t round = 0; round < predicted.size(); ++round) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bp = 0, bc = 0;
        for (std::size_t i = 0; i < predicted.size(); ++i) {
            if (used_p[i]) continue;
            for (std::size_t j = 0; j < computed.size(); ++j) {
                if (used_c[j]) continue;
                const double dist = std::abs(predicted[i] - computed[j]);
                if (dist < best) {
                    best = dist;
                    bp = i;
                    bc = j;
                }
            }
        }
        used_p[bp] = used_c[bc] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

double floquet_vs_spectrum(const CentralConfiguration& cc) { return floquet_vs_spectrum(cc, monodromy(cc)); }

}  // namespace vortex
