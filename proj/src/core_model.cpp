#include "vortex/core_model.hpp"

#include "vortex/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace vortex {

VortexSystem::VortexSystem(std::vector<double> circulations) : gammas_(std::move(circulations)) {
    if (gammas_.size() < 2) {
        throw InvalidSystem("a vortex system needs at least two vortices");
    }
    for (std::size_t i = 0; i < gammas_.size(); ++i) {
        const double g = gammas_[i];
        if (!std::isfinite(g)) {
            throw InvalidSystem("circulation " + std::to_string(i) + " is not finite");
        }
        if (g == 0.0) {
            throw InvalidSystem("circulation " + std::to_string(i) + " is zero");
        }
        total_ += g;
        max_abs_ = std::max(max_abs_, std::abs(g));
        for (std::size_t j = 0; j < i; ++j) {
            const double p = gammas_[j] * g;
            momentum_ += p;
            max_pair_ = std::max(max_pair_, std::abs(p));
        }
    }
    // Exact cancellation is what the invariant forbids; anything tinier than
    // rounding of the sum is treated the same way.
    if (std::abs(total_) <= 8.0 * std::numeric_limits<double>::epsilon() * max_abs_ * static_cast<double>(gammas_.size())) {
        throw ZeroTotalCirculation("total circulation is zero");
    }
}

Configuration::Configuration(Vec coords) : coords_(std::move(coords)) {
    if (coords_.size() % 2 != 0) {
        throw InvalidSystem("coordinate vector must have even length");
    }
    if (!coords_.allFinite()) {
        throw InvalidSystem("coordinates must be finite");
    }
}

Configuration::Configuration(std::initializer_list<std::array<double, 2>> points)
    : Configuration(std::span<const std::array<double, 2>>(points.begin(), points.size())) {}

Configuration::Configuration(std::span<const std::array<double, 2>> points) {
    coords_.resize(static_cast<Eigen::Index>(2 * points.size()));
    Eigen::Index k = 0;
    for (const auto& p : points) {
        coords_[k++] = p[0];
        coords_[k++] = p[1];
    }
    if (!coords_.allFinite()) {
        throw InvalidSystem("coordinates must be finite");
    }
}

double Configuration::min_pair_distance() const {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            best = std::min(best, distance(i, j));
        }
    }
    return best;
}

void require_admissible(const VortexSystem& sys, const Configuration& z, double eps) {
    if (z.size() != sys.size()) {
        std::ostringstream msg;
        msg << "configuration has " << z.size() << " points but the system has " << sys.size() << " vortices";
        throw InvalidSystem(msg.str());
    }
    const std::size_t n = z.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = z.distance(i, j);
            if (!(r > eps)) {
                std::ostringstream msg;
                msg << "vortices " << i << " and " << j << " collide (distance " << r << ")";
                throw CollisionError(msg.str());
            }
        }
    }
}

double hamiltonian(const VortexSystem& sys, const Configuration& z) {
    require_admissible(sys, z);
    double h = 0.0;
    const std::size_t n = sys.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            h -= sys[i] * sys[j] * std::log(z.distance(i, j));
        }
    }
    return h;
}

Vec grad_hamiltonian(const VortexSystem& sys, const Configuration& z) {
    require_admissible(sys, z);
    const std::size_t n = sys.size();
    Vec g = Vec::Zero(sys.dim());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point d = z.point(i) - z.point(j);
            const Point f = (sys[i] * sys[j] / d.squaredNorm()) * d;
            g.segment<2>(static_cast<Eigen::Index>(2 * i)) -= f;
            g.segment<2>(static_cast<Eigen::Index>(2 * j)) += f;
        }
    }
    return g;
}

Mat hessian(const VortexSystem& sys, const Configuration& z) {
    require_admissible(sys, z);
    const std::size_t n = sys.size();
    Mat h = Mat::Zero(sys.dim(), sys.dim());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point d = z.point(i) - z.point(j);
            const double r2 = d.squaredNorm();
            const Point u = d / std::sqrt(r2);
            const Eigen::Matrix2d a =
                (sys[i] * sys[j] / r2) * (Eigen::Matrix2d::Identity() - 2.0 * u * u.transpose());
            const auto bi = static_cast<Eigen::Index>(2 * i);
            const auto bj = static_cast<Eigen::Index>(2 * j);
            h.block<2, 2>(bi, bj) += a;
            h.block<2, 2>(bj, bi) += a;
            h.block<2, 2>(bi, bi) -= a;
            h.block<2, 2>(bj, bj) -= a;
        }
    }
    return h;
}

double angular_impulse(const VortexSystem& sys, const Configuration& z) {
    if (z.size() != sys.size()) {
        throw InvalidSystem("configuration size does not match the system");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        s += sys[i] * z.point(i).squaredNorm();
    }
    return 0.5 * s;
}

double vortex_angular_momentum(const VortexSystem& sys) { return sys.angular_momentum(); }

Point center_of_vorticity(const VortexSystem& sys, const Configuration& z) {
    if (z.size() != sys.size()) {
        throw InvalidSystem("configuration size does not match the system");
    }
    Point c = Point::Zero();
    for (std::size_t i = 0; i < sys.size(); ++i) {
        c += sys[i] * z.point(i);
    }
    return c / sys.total_circulation();
}

double circulation_inner(const VortexSystem& sys, const Vec& v, const Vec& w) {
    if (v.size() != sys.dim() || w.size() != sys.dim()) {
        throw InvalidSystem("vector length does not match 2N");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const auto b = static_cast<Eigen::Index>(2 * i);
        s += sys[i] * (v[b] * w[b] + v[b + 1] * w[b + 1]);
    }
    return s;
}

Mat mass_matrix(const VortexSystem& sys) {
    Vec d(sys.dim());
    for (std::size_t i = 0; i < sys.size(); ++i) {
        d[static_cast<Eigen::Index>(2 * i)] = sys[i];
        d[static_cast<Eigen::Index>(2 * i + 1)] = sys[i];
    }
    return d.asDiagonal();
}

Vec apply_mass_inverse(const VortexSystem& sys, const Vec& v) {
    if (v.size() != sys.dim()) {
        throw InvalidSystem("vector length does not match 2N");
    }
    Vec out(v.size());
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const auto b = static_cast<Eigen::Index>(2 * i);
        out[b] = v[b] / sys[i];
        out[b + 1] = v[b + 1] / sys[i];
    }
    return out;
}

Vec apply_poisson(const Vec& v) {
    Vec out(v.size());
    for (Eigen::Index b = 0; b + 1 < v.size(); b += 2) {
        out[b] = v[b + 1];
        out[b + 1] = -v[b];
    }
    return out;
}

Mat poisson_matrix(Eigen::Index n_vortices) {
    Mat k = Mat::Zero(2 * n_vortices, 2 * n_vortices);
    for (Eigen::Index i = 0; i < n_vortices; ++i) {
        k(2 * i, 2 * i + 1) = 1.0;
        k(2 * i + 1, 2 * i) = -1.0;
    }
    return k;
}

Vec translation_vector(Eigen::Index n_vortices) {
    Vec s = Vec::Zero(2 * n_vortices);
    for (Eigen::Index i = 0; i < n_vortices; ++i) {
        s[2 * i] = 1.0;
    }
    return s;
}

Vec rotate(const Vec& v, double theta) {
    // exp(theta J) = cos(theta) I + sin(theta) J since J^2 = -I.
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Vec out(v.size());
    for (Eigen::Index b = 0; b + 1 < v.size(); b += 2) {
        out[b] = c * v[b] + s * v[b + 1];
        out[b + 1] = -s * v[b] + c * v[b + 1];
    }
    return out;
}

}  // namespace vortex
