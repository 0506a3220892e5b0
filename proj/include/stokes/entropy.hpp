#pragma once

// Form-induced densities, (alpha, eps)-balls, entropy (direct and
// weighted-geometric-mean routes) and generalized means.
//
// A density rho is |coefficient| divided by the total mass Z, normalized per
// chart-coordinate volume (Convention::coordinate) or per Euclidean
// volume/arclength (Convention::intrinsic). The entropy integral
// -sum rho log rho dvol is always taken against the Euclidean measure, so the
// two conventions agree for Cartesian charts and differ on polar ones.

#include "stokes/complex.hpp"
#include "stokes/forms.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace stokes {

std::string_view convention_name(Convention c);
Convention parse_convention(std::string_view text);

struct DensitySample {
    Point where{};
    double rho = 0.0;
    double measure = 0.0; // Euclidean volume/arclength carried by the sample
};

struct DensityField {
    Convention convention = Convention::intrinsic;
    double normalizer = 0.0;
    std::vector<DensitySample> samples;

    /// Sum of rho * measure; 1 whenever the convention is intrinsic.
    [[nodiscard]] double sum_rho_measure() const;
};

/// Density of a top-degree form over a Box/Annulus region on a midpoint grid.
DensityField density_field(const AnalyticForm& form, const RegionDescriptor& region, Convention convention,
                           int resolution);
/// Density of a 1-form along curves in the plane; the coordinate convention
/// averages per unit curve parameter (angle for circles).
DensityField density_field(const AnalyticForm& form, std::span<const Curve> curves, Convention convention,
                           int resolution);
/// Density of a cochain on the support of a chain of the same degree, with
/// |coefficient| multiplicities. Cell measures come from the complex embedding.
DensityField density_field(const Cochain& form, const Chain& carrier, Convention convention);

/// -sum rho log rho * measure with 0 log 0 = 0.
double entropy(const DensityField& field);

enum class EntropyMethod { direct, geometric_mean, closed_form };
std::string_view method_name(EntropyMethod m);

struct EntropyReport {
    double entropy = 0.0;
    double normalizer = 0.0;
    Convention convention = Convention::intrinsic;
    int resolution = 0;
    EntropyMethod method = EntropyMethod::direct;
    double sum_rho_measure = 0.0;
    double schedule_residual = 0.0;
    std::vector<double> refinements;
};

EntropyReport entropy_direct(const AnalyticForm& form, const RegionDescriptor& region, Convention convention,
                             int resolution);
EntropyReport entropy_direct(const AnalyticForm& form, std::span<const Curve> curves, Convention convention,
                             int resolution);
EntropyReport entropy_direct(const Cochain& form, const Chain& carrier, Convention convention);

/// log of the weighted geometric mean prod (Z/|c_i|)^{m_i}, with
/// Z = sum |c_i| v_i and m_i = |c_i| v_i / Z. Zero c_i carry weight zero.
double entropy_geometric_mean(std::span<const double> values, std::span<const double> measures);

/// |alpha| integrated over the ball B(x, eps). The coordinate convention
/// takes the ball in chart coordinates; intrinsic takes the Euclidean ball.
double ball_mass(const AnalyticForm& form, const Point& x, double eps, int resolution = 64,
                 Convention convention = Convention::coordinate);
double unit_ball_volume(int dimension);
double ball_volume(int dimension, double radius);

/// eps_alpha with vol(B(x, eps_alpha)) = ball_mass(alpha, x, eps).
double alpha_ball_radius(const AnalyticForm& form, const Point& x, double eps, int resolution = 64);

struct DensityEstimate {
    double value = 0.0;
    double residual = 0.0;
    std::vector<double> quotients; // ball-average quotient per schedule entry
};

/// eps_k = eps0 * 2^-k, k = 0..steps-1.
std::vector<double> halving_schedule(double eps0, int steps = 7);

inline constexpr double default_limit_tolerance = 1e-6;

/// Ball-average quotient along a decreasing schedule, Richardson-extrapolated
/// (balls are symmetric, so the leading error is O(eps^2)). Throws
/// NoLimitError when successive extrapolants differ by more than `tolerance`
/// relative.
DensityEstimate density_at(const AnalyticForm& form, const RegionDescriptor& region, const Point& x,
                           Convention convention, std::span<const double> schedule, int resolution = 64,
                           double tolerance = default_limit_tolerance);
/// Along curves, balls are arcs of arclength 2*eps centred at x (a chart point
/// on one of the curves).
DensityEstimate density_at(const AnalyticForm& form, std::span<const Curve> curves, const Point& x,
                           Convention convention, std::span<const double> schedule, int resolution = 256,
                           double tolerance = default_limit_tolerance);

/// (sum |f|^p rho dvol)^{1/p}; p = 1 is the density-weighted mean of |f|.
double generalized_mean(const AnalyticForm& form, const RegionDescriptor& region, Convention convention, double p,
                        int resolution);

} // namespace stokes
