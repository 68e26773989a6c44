#pragma once

#include "vortex/dynamics.hpp"
#include "vortex/inertia.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vortex::cli {

inline constexpr const char* kToolName = "vortex_re";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kParse = 2, kValidation = 3, kNumerical = 4 };

/// Malformed input: bad JSON, missing fields, conflicting flags.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input is well formed but does not describe a relative equilibrium.
class ValidationFailure : public InputError {
public:
    using InputError::InputError;
    [[nodiscard]] const char* kind() const noexcept override { return "ValidationFailure"; }
};

struct Tolerances {
    double tol_cc = 1e-8;     ///< residual accepted by validate_cc
    double tol_spec = 1e-8;   ///< |Re lambda| bound, relative to spectral scale
    double tol_zero = 1e-8;   ///< |lambda^2| bound for degeneracy, relative to scale^2
    double kappa_max = 1e8;   ///< eigenvector condition bound for linear stability
    [[nodiscard]] SpectralOptions spectral() const;
};

/// The real root of 9m^3 + 3m^2 + 7m + 5, where rhombus B changes type.
double rhombus_b_transition();

/// Morse index of a_hat as printed in the reference tables for the rhombus
/// families, or nullopt where the tables make no claim.
std::optional<int> reference_morse_rhombus(double m, RhombusBranch branch);
/// Same for the equilateral triangle, keyed on the sign pattern. Only
/// defined for L > 0.
std::optional<int> reference_morse_triangle(double g1, double g2, double g3);

/// Number of nontrivial real lambda pairs, counted strictly from the sign of
/// mu^2 - omega^2 with no degeneracy band. Used as the bisection key.
int strict_real_pairs(const SpectralReport& rep);

/// Direct inertia plus the Theorem B comparison. Where <M xi, xi> vanishes
/// the direct counts are still filled in and the verdict is NotApplicable.
struct InertiaOutcome {
    InertiaReport report;
    bool sign_xi_undefined = false;
    std::string note;
};
InertiaOutcome inertia_outcome(const CentralConfiguration& cc, const InertiaOptions& opts);

struct RhombusRow {
    std::string kind = "sample";  ///< "sample" or "boundary"
    double m = 0.0;
    double y = 0.0;
    double omega = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    std::string classification;
    int n_minus_ahat = 0;
    int n_minus_m = 0;
    double m_xi_xi = 0.0;
    std::string theorem_b;
    std::optional<int> reference_morse;
    std::string matching_forms;
    std::string note;
    std::string error;  ///< empty on success
    int real_pairs = 0;
};

RhombusRow rhombus_row(double m, RhombusBranch branch, const Tolerances& tol);

struct Boundary {
    double m = 0.0;   ///< midpoint of the final bracket
    double lo = 0.0;
    double hi = 0.0;
    int pairs_lo = 0;
    int pairs_hi = 0;
    int morse_lo = 0;
    int morse_hi = 0;
    std::string class_lo;
    std::string class_hi;
};

/// Grid m_k = from + k step (snapped to 1e-12), rows evaluated in parallel
/// and returned in parameter order.
std::vector<RhombusRow> sweep_rhombus(RhombusBranch branch, double from, double to, double step,
                                      const Tolerances& tol, unsigned threads = 0);

/// Bisects every grid interval whose endpoints differ in strict_real_pairs
/// or in n-(a_hat) until the bracket is narrower than `width`. Rows with
/// errors are skipped.
std::vector<Boundary> locate_boundaries(RhombusBranch branch, const std::vector<RhombusRow>& rows,
                                        const Tolerances& tol, double width = 1e-9);

struct TriangleRow {
    std::string pattern;
    double g1 = 0.0, g2 = 0.0, g3 = 0.0;
    double l = 0.0;
    double omega = 0.0;
    std::string classification;
    int n_minus_ahat = 0;
    int n_minus_m = 0;
    int n_plus_m = 0;
    double m_xi_xi = 0.0;
    std::string theorem_b;
    std::optional<int> reference_morse;
    std::string matching_forms;
    std::string error;
};

/// For each of the four sign patterns: a fixed representative followed by
/// `samples - 1` seeded random triples with L > 0.
std::vector<TriangleRow> sweep_triangle(int samples, unsigned seed, const Tolerances& tol);

struct AnalyzeFlags {
    bool solve = false;
    bool verify_dynamics = false;
    Tolerances tol;
};

/// Runs the full analysis on a JSON input document and returns the
/// AnalysisDocument as JSON text.
std::string analyze_json(const std::string& input, const AnalyzeFlags& flags);

std::string rhombus_csv(const std::vector<RhombusRow>& rows);
std::string triangle_csv(const std::vector<TriangleRow>& rows);

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in);

}  // namespace vortex::cli
