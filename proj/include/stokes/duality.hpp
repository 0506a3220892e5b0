#pragma once

// The Stokes relation as a membership test: residuals, exhaustive (or
// sampled) enumeration of bounding candidates B = boundary(R) over subsets R
// of top cells, the entropy comparison against the full boundary, and
// resolution-convergence tables.

#include "stokes/complex.hpp"
#include "stokes/entropy.hpp"
#include "stokes/forms.hpp"
#include "stokes/oracles.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stokes {

/// |<w, B> - <dw, M>| on the complex.
double stokes_residual(const Cochain& omega, const Chain& candidate, const Chain& region);
/// |int_B w - int_M dw| by quadrature; dw is taken symbolically.
double stokes_residual(const AnalyticForm& omega, std::span<const Curve> candidate, const RegionDescriptor& region,
                       int resolution);

inline constexpr std::size_t default_enumeration_cap = 24;
inline constexpr double default_discrete_tolerance = 1e-9;
inline constexpr double default_quadrature_tolerance = 1e-6;
inline constexpr double tie_tolerance = 1e-9;

struct Candidate {
    std::uint32_t mask = 0;             // bit i set <=> top cell i is in R
    std::vector<std::size_t> interior;  // int(B), equal to R
    Chain boundary;                     // B = boundary(R)
    double residual = 0.0;
    std::optional<double> entropy;      // empty when int(B) carries no mass
};

enum class Verdict { extremal, tie_degenerate, violated, unchecked };
std::string_view verdict_name(Verdict v);

struct CandidateReport {
    double target = 0.0; // <dw, M>
    double tolerance = default_discrete_tolerance;
    std::uint32_t full_mask = 0;
    std::vector<Candidate> candidates; // ascending mask; always contains the full boundary
    std::optional<double> boundary_entropy;
    std::uint32_t argmax_mask = 0;
    Verdict verdict = Verdict::unchecked;
    bool sampled = false;
    std::uint64_t seed = 0;
};

/// Every nonempty R with |<dw, R> - <dw, M>| <= tol * (1 + |target|).
/// `omega` has degree n-1; throws TooLargeError above `cap` top cells.
CandidateReport enumerate_candidates(const Cochain& omega, double tol = default_discrete_tolerance,
                                     std::size_t cap = default_enumeration_cap);
/// Same test over `samples` uniformly random subsets (plus the full set).
CandidateReport sample_candidates(const Cochain& omega, double tol, std::size_t samples, std::uint64_t seed);

/// Enumerates, then scores each candidate by the weighted geometric mean of
/// its interior's |dw| cell densities and classifies the outcome.
CandidateReport verify_extremality(const Cochain& omega, double tol = default_discrete_tolerance,
                                   std::size_t cap = default_enumeration_cap);
void score_candidates(CandidateReport& report, const Cochain& omega);

/// Reference path for the enumeration kernel: builds every boundary and
/// pairs it with omega directly.
std::vector<std::uint32_t> enumerate_masks_by_pairing(const Cochain& omega, double tol);

// --- convergence studies ----------------------------------------------------

enum class Quantity { entropy, residual, density };
std::string_view quantity_name(Quantity q);
Quantity parse_quantity(std::string_view text);

struct ConvergenceProblem {
    Quantity quantity = Quantity::entropy;
    std::string name;
    std::function<double(int)> evaluate;
    std::optional<double> reference;
};

struct ConvergenceRow {
    int resolution = 0;
    double value = 0.0;
    std::optional<double> abs_error;
    std::optional<double> observed_order;
};

struct ConvergenceTable {
    std::string problem;
    Quantity quantity = Quantity::entropy;
    std::optional<double> reference;
    std::vector<ConvergenceRow> rows;
};

/// Observed order between rows k-1 and k is
/// log(err_{k-1}/err_k) / log(N_k/N_{k-1}).
ConvergenceTable convergence_study(const ConvergenceProblem& problem, std::span<const int> schedule);

/// S(w, boundary M) for r dtheta through a polar complex with `resolution`
/// angular cells: coordinate densities, chord-length measure.
double annulus_boundary_entropy_discrete(const AnnulusParams& p, int resolution);
/// Same pipeline on the counterclockwise circle of radius r_B.
double annulus_circle_entropy_discrete(const AnnulusParams& p, int resolution);

ConvergenceProblem annulus_boundary_entropy_problem(const AnnulusParams& p);
ConvergenceProblem annulus_circle_entropy_problem(const AnnulusParams& p);
ConvergenceProblem uniform_entropy_problem(const Box& box, double value);
/// Stokes residual of w = r^power dtheta on the annulus against the
/// counterclockwise circle carrying the same flux.
ConvergenceProblem circle_residual_problem(const AnnulusParams& p, double power = 1.0);
/// rho at the box centre for (1 + x^2) dvol on the unit square/cube; the
/// resolution drives the normalizer quadrature.
ConvergenceProblem density_problem(int dimension);

} // namespace stokes
