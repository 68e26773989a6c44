#include "vortex/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vortex {

const char* to_string(StabilityClass c) noexcept {
    switch (c) {
        case StabilityClass::Degenerate: return "Degenerate";
        case StabilityClass::SpectrallyStableOnly: return "SpectrallyStableOnly";
        case StabilityClass::LinearlyStable: return "LinearlyStable";
        case StabilityClass::Unstable: return "Unstable";
    }
    return "Unstable";
}

bool is_spectrally_stable(StabilityClass c) noexcept {
    return c == StabilityClass::SpectrallyStableOnly || c == StabilityClass::LinearlyStable;
}

Mat a_gamma(const CentralConfiguration& cc) {
    const auto& sys = cc.system;
    Mat a = hessian(sys, cc.xi);
    for (std::size_t i = 0; i < sys.size(); ++i) {
        a.middleRows(static_cast<Eigen::Index>(2 * i), 2) /= sys[i];
    }
    a.diagonal().array() += cc.omega;
    return a;
}

Mat a_hat(const CentralConfiguration& cc) {
    Mat a = hessian(cc.system, cc.xi) + cc.omega * mass_matrix(cc.system);
    return 0.5 * (a + a.transpose());
}

Mat stability_matrix(const CentralConfiguration& cc) {
    const Mat ag = a_gamma(cc);
    Mat b(ag.rows(), ag.cols());
    for (Eigen::Index r = 0; r + 1 < ag.rows(); r += 2) {
        b.row(r) = ag.row(r + 1);
        b.row(r + 1) = -ag.row(r);
    }
    return b;
}

Mat TrivialBasis::as_matrix() const {
    Mat t(s.size(), 4);
    t << s, ks, xi, kxi;
    return t;
}

TrivialBasis trivial_basis(const CentralConfiguration& cc) {
    TrivialBasis t;
    t.s = translation_vector(static_cast<Eigen::Index>(cc.system.size()));
    t.ks = apply_poisson(t.s);
    t.xi = cc.xi.coords();
    t.kxi = apply_poisson(t.xi);
    return t;
}

namespace {

/// Orthonormal basis of {v : C^T v = 0} for a full-column-rank C.
Mat orthogonal_complement(const Mat& c) {
    Eigen::HouseholderQR<Mat> qr(c);
    const Mat q = qr.householderQ() * Mat::Identity(c.rows(), c.rows());
    return q.rightCols(c.rows() - c.cols());
}

void require_momentum(const VortexSystem& sys) {
    if (std::abs(sys.angular_momentum()) < 1e-12 * sys.max_pair_product()) {
        throw DegenerateMomentum("L = sum of pair products vanishes; W and its complement intersect");
    }
}

Vec mass_times(const VortexSystem& sys, const Vec& v) {
    Vec out = v;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        out.segment<2>(static_cast<Eigen::Index>(2 * i)) *= sys[i];
    }
    return out;
}

std::vector<cplx> to_vector(const CVec& v) { return {v.data(), v.data() + v.size()}; }

void sort_spectrum(std::vector<cplx>& v) {
    std::sort(v.begin(), v.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
}

double spectral_radius(const std::vector<cplx>& v) {
    double r = 0.0;
    for (const auto& x : v) r = std::max(r, std::abs(x));
    return r;
}

enum class Band { Inside, Ambiguous, Outside };

Band band(double value, double tol, double factor) {
    if (value <= tol) return Band::Inside;
    if (value <= factor * tol) return Band::Ambiguous;
    return Band::Outside;
}

double condition_of_eigenvectors(const Mat& a) {
    if (a.rows() == 0) return 1.0;
    Eigen::EigenSolver<Mat> es(a, true);
    CMat v = es.eigenvectors();
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        const double nrm = v.col(j).norm();
        if (nrm > 0) v.col(j) /= nrm;
    }
    Eigen::JacobiSVD<CMat> svd(v);
    const auto& sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return sv[0] / smin;
}

/// Type of an eigenvalue pair as seen through lambda^2 (or mu^2 - omega^2).
enum class PairType { Real, Imaginary, Complex, Zero, Unclear };

PairType type_of_square(cplx sq, double tol, double factor) {
    const double a = std::abs(sq);
    if (a <= tol) return PairType::Zero;
    if (a <= factor * tol) return PairType::Unclear;
    const double im = std::abs(sq.imag());
    if (im <= tol) return sq.real() > 0 ? PairType::Real : PairType::Imaginary;
    if (im <= factor * tol) return PairType::Unclear;
    return PairType::Complex;
}

}  // namespace

Mat w_perp_basis(const CentralConfiguration& cc) {
    require_momentum(cc.system);
    const TrivialBasis t = trivial_basis(cc);
    Mat c(t.xi.size(), 2);
    c << mass_times(cc.system, t.xi), mass_times(cc.system, t.kxi);
    return orthogonal_complement(c);
}

Mat nontrivial_basis(const CentralConfiguration& cc) {
    const TrivialBasis t = trivial_basis(cc);
    const Mat c = t.as_matrix();
    Eigen::ColPivHouseholderQR<Mat> rank_check(c);
    rank_check.setThreshold(1e-10);
    if (rank_check.rank() < 4) {
        throw RankDeficientBasis("s, Ks, xi, K xi are linearly dependent");
    }
    return orthogonal_complement(c);
}

std::vector<cplx> sorted_eigenvalues(const Mat& a) {
    if (a.rows() == 0) return {};
    Eigen::EigenSolver<Mat> es(a, false);
    auto v = to_vector(es.eigenvalues());
    sort_spectrum(v);
    return v;
}

SpectralReport nontrivial_spectrum(const CentralConfiguration& cc, const SpectralOptions& opts) {
    SpectralReport rep;
    const double w = cc.omega;
    rep.omega = w;

    const Mat b = stability_matrix(cc);
    const Mat g = a_gamma(cc) - w * Mat::Identity(b.rows(), b.cols());
    rep.eigenvalues_b = sorted_eigenvalues(b);
    rep.mus = sorted_eigenvalues(g);
    rep.scale = std::max(1.0, spectral_radius(rep.eigenvalues_b));
    const double sc = rep.scale;

    // Witness the four symmetry eigenvalues through their known eigenvectors.
    const TrivialBasis t = trivial_basis(cc);
    const double xn = t.xi.norm();
    const double sn = t.s.norm();
    const double r_s = (b * t.s - w * t.ks).norm() / (sc * sn);
    const double r_ks = (b * t.ks + w * t.s).norm() / (sc * sn);
    const double r_kxi = (b * t.kxi).norm() / (sc * xn);
    const double r_xi = (b * t.xi - 2.0 * w * t.kxi).norm() / (sc * xn);
    const double r_pair = std::max(r_s, r_ks);
    rep.trivial_part = {
        {cplx(0.0, w), "s-iKs", r_pair},
        {cplx(0.0, -w), "s+iKs", r_pair},
        {cplx(0.0, 0.0), "Kxi", r_kxi},
        {cplx(0.0, 0.0), "xi", r_xi},
    };
    for (const auto& tw : rep.trivial_part) {
        if (!(tw.residual <= opts.trivial_tol)) {
            std::ostringstream msg;
            msg << "symmetry eigenvector " << tw.witness << " has relative residual " << tw.residual
                << "; the input is not a central configuration";
            throw TrivialMatchFailure(msg.str());
        }
    }

    // span(s, Ks, xi, K xi) is invariant under B and M^{-1} D^2H, so in an
    // orthonormal basis adapted to it both are block upper triangular and the
    // lower-right block carries exactly the remaining 2N - 4 eigenvalues. This
    // works even when L = 0, where the M-orthogonal splitting breaks down.
    const Mat q = nontrivial_basis(cc);
    const Mat bq = q.transpose() * b * q;
    const Mat gq = q.transpose() * g * q;
    rep.nontrivial_part = sorted_eigenvalues(bq);
    rep.nontrivial_mus = sorted_eigenvalues(gq);
    rep.eigvec_condition = condition_of_eigenvectors(bq);

    const double f = opts.ambiguity_factor;
    const double zero_tol = opts.tol_zero * sc * sc;
    const double spec_tol = opts.tol_spec * sc;
    std::ostringstream notes;

    // Route 1: sigma(B).
    rep.min_abs_lambda_sq = std::numeric_limits<double>::infinity();
    bool any_zero = false;
    for (const auto& l : rep.nontrivial_part) {
        const double sq = std::abs(l * l);
        rep.min_abs_lambda_sq = std::min(rep.min_abs_lambda_sq, sq);
        rep.max_abs_re_lambda = std::max(rep.max_abs_re_lambda, std::abs(l.real()));
        const Band bz = band(sq, zero_tol, f);
        if (bz == Band::Inside) any_zero = true;
        if (bz == Band::Ambiguous) {
            rep.ambiguous = true;
            notes << "lambda=" << l << " is near zero; ";
        }
    }
    if (rep.nontrivial_part.empty()) rep.min_abs_lambda_sq = 0.0;

    if (any_zero) {
        rep.classification = StabilityClass::Degenerate;
    } else {
        bool stable = true;
        for (const auto& l : rep.nontrivial_part) {
            const Band br = band(std::abs(l.real()), spec_tol, f);
            if (br == Band::Ambiguous) {
                rep.ambiguous = true;
                notes << "Re(lambda)=" << l.real() << " sits near the stability boundary; ";
            }
            if (br != Band::Inside) stable = false;
        }
        if (!stable) {
            rep.classification = StabilityClass::Unstable;
        } else if (rep.eigvec_condition <= opts.kappa_max) {
            rep.classification = StabilityClass::LinearlyStable;
        } else {
            rep.classification = StabilityClass::SpectrallyStableOnly;
        }
    }

    // Route 2: mu in iR, or mu real with |mu| <= |omega|; degenerate iff mu = +-omega.
    {
        bool degenerate = false;
        bool stable = true;
        const double mtol = opts.tol_spec * sc;
        for (const auto& m : rep.nontrivial_mus) {
            const double d = std::abs(m * m - w * w);
            const Band bz = band(d, zero_tol, f);
            if (bz == Band::Inside) degenerate = true;
            if (bz == Band::Ambiguous) {
                rep.ambiguous = true;
                notes << "mu=" << m << " is near +-omega; ";
            }
            const Band re = band(std::abs(m.real()), mtol, f);
            const Band im = band(std::abs(m.imag()), mtol, f);
            const bool on_imag = re == Band::Inside;
            const bool on_real = im == Band::Inside;
            if ((re == Band::Ambiguous && !on_real) || (im == Band::Ambiguous && !on_imag)) {
                rep.ambiguous = true;
                notes << "mu=" << m << " is near the real/imaginary axes; ";
            }
            const bool ok = on_imag || (on_real && std::abs(m) <= std::abs(w));
            if (!ok) stable = false;
        }
        if (degenerate) {
            rep.mu_classification = StabilityClass::Degenerate;
        } else if (!stable) {
            rep.mu_classification = StabilityClass::Unstable;
        } else {
            // The mu criterion speaks to spectral stability only; diagonalizability
            // is a property of B, so the refinement is taken from route 1's test.
            rep.mu_classification = rep.eigvec_condition <= opts.kappa_max ? StabilityClass::LinearlyStable
                                                                             : StabilityClass::SpectrallyStableOnly;
        }
    }
    auto coarse = [](StabilityClass c) {
        return is_spectrally_stable(c) ? StabilityClass::LinearlyStable : c;
    };
    rep.routes_agree = coarse(rep.classification) == coarse(rep.mu_classification);
    rep.ambiguity_note = notes.str();

    // Pairing data, including the three-way case mapping.
    rep.pairing_error = 0.0;
    rep.pairing_case_mismatches = 0;
    const double ptol = opts.tol_spec * sc * sc;
    for (const auto& l : rep.eigenvalues_b) {
        double best = std::numeric_limits<double>::infinity();
        cplx best_mu;
        for (const auto& m : rep.mus) {
            const double e = std::abs(l * l + w * w - m * m);
            if (e < best) {
                best = e;
                best_mu = m;
            }
        }
        rep.pairing_error = std::max(rep.pairing_error, best);
        const PairType tl = type_of_square(l * l, ptol, f);
        const PairType tm = type_of_square(best_mu * best_mu - w * w, ptol, f);
        if (tl != PairType::Unclear && tm != PairType::Unclear && tl != tm) {
            ++rep.pairing_case_mismatches;
        }
    }

    // Signature from the mu side: a nontrivial mu crossing +-omega is a simple
    // real eigenvalue of M^{-1} D^2H, so the sign of mu^2 - omega^2 is well
    // conditioned even where lambda sits on a Jordan block. Each (mu, -mu)
    // pair is counted once.
    const double axis_tol = 64.0 * std::numeric_limits<double>::epsilon() * sc * sc;
    for (const auto& m : rep.nontrivial_mus) {
        const cplx sq = m * m - w * w;
        if (std::abs(sq.imag()) <= axis_tol) {
            const bool representative = std::abs(m.imag()) <= std::abs(m.real()) ? m.real() > 0 : m.imag() > 0;
            if (!representative) continue;
            if (sq.real() > 0) {
                ++rep.signature.real_pairs;
            } else if (sq.real() < 0) {
                ++rep.signature.imaginary_pairs;
            } else {
                ++rep.signature.zero;
            }
        } else if (m.real() > 0 && m.imag() > 0) {
            ++rep.signature.complex_quartets;
        }
    }
    return rep;
}

StabilityClass classify(const CentralConfiguration& cc, const SpectralOptions& opts) {
    const SpectralReport rep = nontrivial_spectrum(cc, opts);
    if (rep.ambiguous) {
        throw AmbiguousClassification("classification is within the ambiguity band: " + rep.ambiguity_note);
    }
    if (!rep.routes_agree) {
        throw ClassificationMismatch(std::string("sigma(B) route gives ") + to_string(rep.classification) +
                                     " but the mu criterion gives " + to_string(rep.mu_classification));
    }
    return rep.classification;
}

double pairing_check(const CentralConfiguration& cc, const SpectralOptions& opts) {
    return nontrivial_spectrum(cc, opts).pairing_error;
}

}  // namespace vortex
