#include "vortex/inertia.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace vortex {

const char* to_string(TheoremBVerdict v) noexcept {
    switch (v) {
        case TheoremBVerdict::Holds: return "Holds";
        case TheoremBVerdict::Violated: return "Violated";
        case TheoremBVerdict::NotApplicable: return "NotApplicable";
    }
    return "NotApplicable";
}

InertiaTriple inertia_of(const Mat& a, double zero_tol) {
    if (a.rows() != a.cols()) {
        throw NotSymmetric("inertia needs a square matrix");
    }
    InertiaTriple t;
    if (a.rows() == 0) return t;
    const double amax = a.cwiseAbs().maxCoeff();
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, amax)) {
        throw NotSymmetric("matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
    const Vec& ev = es.eigenvalues();
    const double tol = zero_tol * std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] < -tol) {
            ++t.n_minus;
        } else if (ev[i] > tol) {
            ++t.n_plus;
        } else {
            ++t.n_zero;
        }
    }
    return t;
}

InertiaTriple restricted_inertia(const Mat& a, const Mat& basis, double zero_tol) {
    if (basis.cols() == 0) return {};
    if (basis.rows() != a.rows()) {
        throw RankDeficientBasis("basis vectors have the wrong length");
    }
    Eigen::ColPivHouseholderQR<Mat> qr(basis);
    qr.setThreshold(1e-10);
    if (qr.rank() < basis.cols()) {
        throw RankDeficientBasis("basis vectors are linearly dependent");
    }
    const Mat q = qr.householderQ() * Mat::Identity(basis.rows(), basis.cols());
    const Mat gram = q.transpose() * a * q;
    return inertia_of(0.5 * (gram + gram.transpose()), zero_tol);
}

namespace {

int count_small(const Vec& sv, double rel) {
    if (sv.size() == 0) return 0;
    const double cut = rel * std::max(sv[0], std::numeric_limits<double>::min());
    return static_cast<int>((sv.array() <= cut).count());
}

template <class MatrixT>
MatrixT power(const MatrixT& a, int k) {
    MatrixT p = a;
    for (int i = 1; i < k; ++i) p = p * a;
    return p;
}

template <class MatrixT>
void fill_cluster(EigenCluster& c, const MatrixT& shifted, double rank_tol) {
    const int m = c.algebraic;
    {
        Eigen::JacobiSVD<MatrixT> svd(shifted);
        c.geometric = std::min(m, count_small(svd.singularValues(), rank_tol));
    }
    c.jordan_depth = m;
    for (int k = 1; k <= m; ++k) {
        Eigen::JacobiSVD<MatrixT> svd(power(shifted, k));
        if (count_small(svd.singularValues(), rank_tol) >= m) {
            c.jordan_depth = k;
            break;
        }
    }
    Eigen::JacobiSVD<MatrixT> svd(power(shifted, m), Eigen::ComputeFullV);
    c.basis = svd.matrixV().rightCols(m).template cast<cplx>();
}

}  // namespace

EigenspaceDecomposition generalized_eigenspaces(const Mat& a, const DecompositionOptions& opts) {
    EigenspaceDecomposition dec;
    const auto n = a.rows();
    if (n == 0) return dec;
    Eigen::EigenSolver<Mat> es(a, false);
    const CVec ev = es.eigenvalues();
    dec.scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    const double tol = opts.cluster_tol * dec.scale;

    // Single-linkage clustering with union-find.
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](Eigen::Index i) {
        while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)];
        return i;
    };
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::abs(ev[i] - ev[j]) <= tol) parent[static_cast<std::size_t>(find(i))] = find(j);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = std::abs(ev[i] - ev[j]);
            if (find(i) != find(j) && d <= opts.ambiguity_factor * tol) {
                std::ostringstream msg;
                msg << "eigenvalues " << ev[i] << " and " << ev[j] << " are " << d
                    << " apart, too close to decide whether they belong together";
                throw ClusterAmbiguity(msg.str());
            }
        }

    std::vector<Eigen::Index> roots;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto r = find(i);
        if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
    }
    for (const auto r : roots) {
        EigenCluster c;
        cplx sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (find(i) == r) {
                sum += ev[i];
                ++c.algebraic;
            }
        }
        c.nu = sum / static_cast<double>(c.algebraic);
        if (std::abs(c.nu.imag()) <= tol) c.nu = c.nu.real();
        if (c.is_real()) {
            const Mat shifted = a - c.nu.real() * Mat::Identity(n, n);
            fill_cluster(c, shifted, opts.rank_tol);
        } else {
            const CMat shifted = a.cast<cplx>() - c.nu * CMat::Identity(n, n);
            fill_cluster(c, shifted, opts.rank_tol);
        }
        dec.clusters.push_back(std::move(c));
    }
    std::sort(dec.clusters.begin(), dec.clusters.end(), [](const EigenCluster& x, const EigenCluster& y) {
        if (x.nu.real() != y.nu.real()) return x.nu.real() < y.nu.real();
        return x.nu.imag() < y.nu.imag();
    });
    return dec;
}

double m_orthogonality_check(const VortexSystem& sys, const EigenspaceDecomposition& dec) {
    const Mat m = mass_matrix(sys);
    const CMat mc = m.cast<cplx>();
    const double tol = 1e-5 * dec.scale;
    double worst = 0.0;
    for (const auto& c1 : dec.clusters) {
        for (const auto& c2 : dec.clusters) {
            if (std::abs(c1.nu - std::conj(c2.nu)) <= tol) continue;
            const CMat g = c2.basis.adjoint() * mc * c1.basis;
            worst = std::max(worst, g.cwiseAbs().maxCoeff());
        }
    }
    return worst / sys.max_abs_circulation();
}

INuSummary i_nu_inertia(const CentralConfiguration& cc, const EigenspaceDecomposition& dec, double zero_tol) {
    INuSummary out;
    const Mat ah = a_hat(cc);
    const double zero_band = 1e-5 * dec.scale;
    for (const auto& c : dec.clusters) {
        if (c.nu.imag() < 0) continue;
        INuInertia e;
        e.nu = c.nu;
        e.multiplicity = c.algebraic;
        e.complex_pair = !c.is_real();
        Mat basis;
        if (e.complex_pair) {
            basis.resize(c.basis.rows(), 2 * c.basis.cols());
            basis << c.basis.real(), c.basis.imag();
        } else {
            basis = c.basis.real();
        }
        e.inertia = restricted_inertia(ah, basis, zero_tol);
        if (std::abs(c.nu) > zero_band && e.inertia.n_zero > 0) {
            std::ostringstream msg;
            msg << "restriction of the symmetric pencil to I_nu for nu = " << c.nu << " is singular";
            throw DegenerateRestriction(msg.str());
        }
        if (e.complex_pair && !(e.inertia.n_minus == e.multiplicity && e.inertia.n_plus == e.multiplicity)) {
            out.complex_lemma_holds = false;
        }
        out.total.n_minus += e.inertia.n_minus;
        out.total.n_zero += e.inertia.n_zero;
        out.total.n_plus += e.inertia.n_plus;
        out.entries.push_back(e);
    }
    out.direct = inertia_of(ah, zero_tol);
    out.additivity_holds = out.total.n_minus == out.direct.n_minus;
    return out;
}

InertiaReport check_theorem_b(const CentralConfiguration& cc, const InertiaOptions& opts) {
    InertiaReport r;
    const auto& sys = cc.system;
    const Mat ah = a_hat(cc);
    const Mat m = mass_matrix(sys);
    const Vec xi = cc.xi.coords();
    const Vec kxi = apply_poisson(xi);

    r.m_xi_xi = circulation_inner(sys, xi, xi);
    const double xi_floor = opts.xi_tol * xi.squaredNorm() * sys.max_abs_circulation();
    if (!(std::abs(r.m_xi_xi) > xi_floor)) {
        throw IndefiniteSignXi("<M xi, xi> vanishes; the index formula branches are undefined");
    }
    r.omega_sign = cc.omega > 0 ? 1 : (cc.omega < 0 ? -1 : 0);

    r.inertia_ahat = inertia_of(ah, opts.zero_tol);
    r.inertia_m = inertia_of(m, opts.zero_tol);
    Mat w(xi.size(), 2);
    w << xi, kxi;
    r.inertia_ahat_w = restricted_inertia(ah, w, opts.zero_tol);
    r.inertia_m_w = restricted_inertia(m, w, opts.zero_tol);
    const Mat wp = w_perp_basis(cc);
    r.inertia_ahat_wperp = restricted_inertia(ah, wp, opts.zero_tol);
    r.inertia_m_wperp = restricted_inertia(m, wp, opts.zero_tol);

    const int nm = r.inertia_m.n_minus;
    const int np = r.inertia_m.n_plus;
    const int direct = r.inertia_ahat.n_minus;
    if (direct == nm) r.matching_forms.emplace_back("n-(M)");
    if (direct == nm - 1) r.matching_forms.emplace_back("n-(M)-1");
    if (direct == np - 1) r.matching_forms.emplace_back("n+(M)-1");
    if (direct == np) r.matching_forms.emplace_back("n+(M)");

    const bool xi_pos = r.m_xi_xi > 0;
    if (r.omega_sign > 0) {
        r.predicted_n_minus = xi_pos ? nm : nm - 1;
        r.predicted_n_minus_wperp = r.inertia_m_wperp.n_minus;
    } else if (r.omega_sign < 0) {
        r.predicted_n_minus = xi_pos ? np - 1 : np;
        r.predicted_n_minus_wperp = r.inertia_m_wperp.n_plus;
    }
    r.index_formula_holds = r.omega_sign != 0 && r.predicted_n_minus == direct;
    r.restriction_formula_holds = r.omega_sign != 0 && r.predicted_n_minus_wperp == r.inertia_ahat_wperp.n_minus;

    std::ostringstream det;
    const SpectralReport sp = nontrivial_spectrum(cc, opts.spectral);
    r.classification = sp.classification;
    if (r.omega_sign == 0) {
        det << "omega = 0; neither branch applies";
    } else if (sp.ambiguous || !sp.routes_agree) {
        det << "spectral classification is ambiguous; hypotheses cannot be confirmed";
    } else if (!is_spectrally_stable(sp.classification)) {
        det << "configuration is " << to_string(sp.classification) << ", outside the theorem's hypotheses";
    } else {
        r.verdict = (r.index_formula_holds && r.restriction_formula_holds) ? TheoremBVerdict::Holds
                                                                           : TheoremBVerdict::Violated;
    }
    det << (det.tellp() > 0 ? "; " : "") << "omega " << (r.omega_sign > 0 ? ">" : "<") << " 0, <M xi, xi> "
        << (xi_pos ? ">" : "<") << " 0: predicted n-(A) = " << r.predicted_n_minus << ", direct " << direct
        << "; predicted n-(A|Wperp) = " << r.predicted_n_minus_wperp << ", direct " << r.inertia_ahat_wperp.n_minus;
    r.details = det.str();
    return r;
}

}  // namespace vortex
