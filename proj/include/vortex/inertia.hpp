#pragma once

#include "vortex/spectral.hpp"

#include <string>
#include <vector>

namespace vortex {

/// Counts of negative, zero and positive eigenvalues of a symmetric form.
struct InertiaTriple {
    int n_minus = 0;
    int n_zero = 0;
    int n_plus = 0;
    [[nodiscard]] int dim() const noexcept { return n_minus + n_zero + n_plus; }
    friend bool operator==(const InertiaTriple&, const InertiaTriple&) = default;
};

/// Eigenvalues below -zero_tol*scale, within, and above, with
/// scale = max(1, max |eigenvalue|). Throws NotSymmetric when the input
/// deviates from symmetry by more than 1e-10 relative.
InertiaTriple inertia_of(const Mat& a, double zero_tol = 1e-9);

/// Inertia of v -> <A v, v> on span(basis columns). The basis is first
/// orthonormalized, which leaves the answer unchanged by Sylvester's law.
InertiaTriple restricted_inertia(const Mat& a, const Mat& basis, double zero_tol = 1e-9);

struct EigenCluster {
    cplx nu;
    CMat basis;  ///< orthonormal columns spanning the generalized eigenspace
    int algebraic = 0;
    int geometric = 0;
    int jordan_depth = 1;  ///< smallest k with dim ker (A - nu)^k = algebraic
    [[nodiscard]] bool is_real() const noexcept { return nu.imag() == 0.0; }
};

struct EigenspaceDecomposition {
    std::vector<EigenCluster> clusters;
    double scale = 1.0;
};

struct DecompositionOptions {
    double cluster_tol = 1e-6;
    double rank_tol = 1e-8;
    double ambiguity_factor = 10.0;
};

/// Groups the eigenvalues of `a` into clusters and computes E_nu for each as
/// the numerical kernel of (A - nu)^m. Throws ClusterAmbiguity when two
/// clusters are closer than ambiguity_factor * cluster_tol * scale.
EigenspaceDecomposition generalized_eigenspaces(const Mat& a, const DecompositionOptions& opts = {});

/// max |v2^H M v1| over unit v1 in E_nu1, v2 in E_nu2 with nu1 != conj(nu2),
/// divided by max |G_i|.
double m_orthogonality_check(const VortexSystem& sys, const EigenspaceDecomposition& dec);

struct INuInertia {
    cplx nu;             ///< representative (Im nu >= 0)
    int multiplicity = 0;  ///< algebraic multiplicity of nu
    bool complex_pair = false;
    InertiaTriple inertia;
};

struct INuSummary {
    std::vector<INuInertia> entries;
    InertiaTriple total;     ///< sum of the restricted inertias
    InertiaTriple direct;    ///< inertia_of(a_hat)
    bool complex_lemma_holds = true;  ///< n- = n+ = m_nu on every complex pair
    bool additivity_holds = true;    ///< total.n_minus == direct.n_minus
};

/// Restricted inertia of a_hat on each I_nu of a_gamma. Throws
/// DegenerateRestriction when nu != 0 but the restricted form is singular.
INuSummary i_nu_inertia(const CentralConfiguration& cc, const EigenspaceDecomposition& dec, double zero_tol = 1e-9);

enum class TheoremBVerdict { Holds, Violated, NotApplicable };
[[nodiscard]] const char* to_string(TheoremBVerdict v) noexcept;

struct InertiaOptions {
    double zero_tol = 1e-9;
    /// |<M xi, xi>| below this (relative to |xi|^2 max|G|) leaves the sign undefined.
    double xi_tol = 1e-10;
    SpectralOptions spectral{};
};

struct InertiaReport {
    InertiaTriple inertia_ahat;
    InertiaTriple inertia_m;
    InertiaTriple inertia_ahat_w;
    InertiaTriple inertia_m_w;
    InertiaTriple inertia_ahat_wperp;
    InertiaTriple inertia_m_wperp;
    double m_xi_xi = 0.0;
    int omega_sign = 0;
    StabilityClass classification = StabilityClass::Unstable;
    /// n-(a_hat) according to the index formula branch selected by the signs.
    int predicted_n_minus = 0;
    /// n-(a_hat | W-perp) according to the restriction formula.
    int predicted_n_minus_wperp = 0;
    bool index_formula_holds = false;
    bool restriction_formula_holds = false;
    TheoremBVerdict verdict = TheoremBVerdict::NotApplicable;
    /// Which of the four candidate closed forms n-(M), n-(M)-1, n+(M)-1, n+(M)
    /// coincide with the direct n-(a_hat).
    std::vector<std::string> matching_forms;
    std::string details;
};

InertiaReport check_theorem_b(const CentralConfiguration& cc, const InertiaOptions& opts = {});

}  // namespace vortex
