#pragma once

// Planar point-vortex Hamiltonian calculus.
//
// Coordinates are interleaved: z = (x1, y1, x2, y2, ..., xN, yN). The Poisson
// matrix K = I_N (x) J applies J = [[0, 1], [-1, 0]] to every 2-block, and the
// circulation matrix M = diag(G1, G1, ..., GN, GN).

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace vortex {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Point = Eigen::Vector2d;

/// Default minimum admissible pairwise distance.
inline constexpr double kCollisionEpsilon = 1e-12;

/// Circulation strengths of an N-vortex system.
///
/// Invariants (checked on construction): N >= 2, every strength nonzero,
/// total circulation nonzero.
class VortexSystem {
public:
    explicit VortexSystem(std::vector<double> circulations);
    VortexSystem(std::initializer_list<double> circulations)
        : VortexSystem(std::vector<double>(circulations)) {}

    [[nodiscard]] std::size_t size() const noexcept { return gammas_.size(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(2 * gammas_.size()); }
    [[nodiscard]] double operator[](std::size_t i) const { return gammas_[i]; }
    [[nodiscard]] std::span<const double> circulations() const noexcept { return gammas_; }

    /// Sum of all circulations.
    [[nodiscard]] double total_circulation() const noexcept { return total_; }
    /// Sum over pairs i < j of Gi * Gj.
    [[nodiscard]] double angular_momentum() const noexcept { return momentum_; }
    /// Largest |Gi * Gj| over pairs, used to scale momentum tests.
    [[nodiscard]] double max_pair_product() const noexcept { return max_pair_; }
    [[nodiscard]] double max_abs_circulation() const noexcept { return max_abs_; }

private:
    std::vector<double> gammas_;
    double total_ = 0.0;
    double momentum_ = 0.0;
    double max_pair_ = 0.0;
    double max_abs_ = 0.0;
};

/// Flattened planar positions.
class Configuration {
public:
    Configuration() = default;
    explicit Configuration(Vec coords);
    Configuration(std::initializer_list<std::array<double, 2>> points);
    explicit Configuration(std::span<const std::array<double, 2>> points);

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(coords_.size() / 2); }
    [[nodiscard]] const Vec& coords() const noexcept { return coords_; }
    [[nodiscard]] Point point(std::size_t i) const {
        return coords_.segment<2>(static_cast<Eigen::Index>(2 * i));
    }
    [[nodiscard]] double distance(std::size_t i, std::size_t j) const { return (point(i) - point(j)).norm(); }
    [[nodiscard]] double min_pair_distance() const;

private:
    Vec coords_;
};

/// Throws CollisionError unless every pairwise distance exceeds `eps`.
/// Also throws InvalidSystem when the configuration does not match the system size.
void require_admissible(const VortexSystem& sys, const Configuration& z, double eps = kCollisionEpsilon);

double hamiltonian(const VortexSystem& sys, const Configuration& z);
Vec grad_hamiltonian(const VortexSystem& sys, const Configuration& z);
/// Closed-form Hessian assembled from the 2x2 pair blocks.
Mat hessian(const VortexSystem& sys, const Configuration& z);

/// I(z) = 1/2 sum Gi |zi|^2. May be negative or zero for mixed signs.
double angular_impulse(const VortexSystem& sys, const Configuration& z);
double vortex_angular_momentum(const VortexSystem& sys);
Point center_of_vorticity(const VortexSystem& sys, const Configuration& z);

/// sum_i Gi (vi . wi) = w^T M v.
double circulation_inner(const VortexSystem& sys, const Vec& v, const Vec& w);
Mat mass_matrix(const VortexSystem& sys);
/// M^{-1} v.
Vec apply_mass_inverse(const VortexSystem& sys, const Vec& v);

/// K v, with K = I_N (x) J.
Vec apply_poisson(const Vec& v);
Mat poisson_matrix(Eigen::Index n_vortices);
/// Translation generator s = (1, 0, 1, 0, ..., 1, 0).
Vec translation_vector(Eigen::Index n_vortices);
/// Blockwise rotation exp(theta K), i.e. each point multiplied by exp(theta J).
Vec rotate(const Vec& v, double theta);

}  // namespace vortex
