#pragma once

#include "vortex/central_config.hpp"

#include <complex>
#include <string>
#include <vector>

namespace vortex {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

enum class StabilityClass { Degenerate, SpectrallyStableOnly, LinearlyStable, Unstable };

[[nodiscard]] const char* to_string(StabilityClass c) noexcept;
[[nodiscard]] bool is_spectrally_stable(StabilityClass c) noexcept;

struct SpectralOptions {
    /// Degeneracy: |lambda^2| <= tol_zero * scale^2 for a nontrivial lambda.
    double tol_zero = 1e-8;
    /// Spectral stability: |Re lambda| <= tol_spec * scale.
    double tol_spec = 1e-8;
    /// Upper bound on the eigenvector condition number for linear stability.
    double kappa_max = 1e8;
    /// Values within this factor above a tolerance are reported ambiguous.
    double ambiguity_factor = 10.0;
    /// Relative residual allowed for the four symmetry witnesses.
    double trivial_tol = 1e-8;
};

/// M^{-1} D^2H(xi) + omega I.
Mat a_gamma(const CentralConfiguration& cc);
/// D^2H(xi) + omega M, the symmetric companion of a_gamma.
Mat a_hat(const CentralConfiguration& cc);
/// B = K a_gamma.
Mat stability_matrix(const CentralConfiguration& cc);

struct TrivialBasis {
    Vec s, ks, xi, kxi;
    [[nodiscard]] Mat as_matrix() const;
};
TrivialBasis trivial_basis(const CentralConfiguration& cc);

/// Columns span {w : <M w, xi> = <M w, K xi> = 0}; orthonormal in the
/// Euclidean sense. Throws DegenerateMomentum when L is (numerically) zero.
Mat w_perp_basis(const CentralConfiguration& cc);

/// Columns span the M-orthogonal complement of span(s, Ks, xi, K xi),
/// dimension 2N - 4, orthonormal in the Euclidean sense.
Mat nontrivial_basis(const CentralConfiguration& cc);

struct TrivialWitness {
    cplx value;
    std::string witness;  ///< "s-iKs", "s+iKs", "Kxi", "xi"
    double residual = 0.0;
};

/// Counts of nontrivial eigenvalue types, typed by the exact sign pattern of
/// lambda^2 (no tolerance). Used to detect transitions when bisecting.
struct SpectralSignature {
    int real_pairs = 0;
    int imaginary_pairs = 0;
    int complex_quartets = 0;
    int zero = 0;
    friend bool operator==(const SpectralSignature&, const SpectralSignature&) = default;
};

struct SpectralReport {
    double omega = 0.0;
    double scale = 1.0;
    std::vector<cplx> eigenvalues_b;          ///< all 2N
    std::vector<TrivialWitness> trivial_part; ///< four entries
    std::vector<cplx> nontrivial_part;        ///< 2N - 4
    std::vector<cplx> mus;                    ///< all 2N eigenvalues of M^{-1} D^2H
    std::vector<cplx> nontrivial_mus;         ///< 2N - 4
    StabilityClass classification = StabilityClass::Unstable;     ///< from sigma(B)
    StabilityClass mu_classification = StabilityClass::Unstable;  ///< from the mu criterion
    bool routes_agree = true;
    bool ambiguous = false;
    std::string ambiguity_note;
    double pairing_error = 0.0;
    int pairing_case_mismatches = 0;
    double eigvec_condition = 1.0;
    double min_abs_lambda_sq = 0.0;  ///< smallest |lambda^2| over nontrivial lambda
    double max_abs_re_lambda = 0.0;
    SpectralSignature signature;
};

/// Full spectral analysis. Does not throw on ambiguity; inspect the flags.
SpectralReport nontrivial_spectrum(const CentralConfiguration& cc, const SpectralOptions& opts = {});

/// Classification that refuses to guess: throws AmbiguousClassification when
/// a value sits in an ambiguity band, ClassificationMismatch when the sigma(B)
/// and mu routes disagree.
StabilityClass classify(const CentralConfiguration& cc, const SpectralOptions& opts = {});

/// max over lambda in sigma(B) of min over mu of |lambda^2 + omega^2 - mu^2|.
double pairing_check(const CentralConfiguration& cc, const SpectralOptions& opts = {});

/// Eigenvalues of a real matrix sorted by (real part desc, imaginary part desc).
std::vector<cplx> sorted_eigenvalues(const Mat& a);

}  // namespace vortex
