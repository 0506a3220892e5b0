#pragma once

// Differential forms: analytic (coefficient expressions over a chart box,
// optionally piecewise) and discrete (cochains on a GridComplex), with the
// exterior derivative, coboundary, pairing and midpoint-rule integration.

#include "stokes/complex.hpp"
#include "stokes/expression.hpp"
#include "stokes/kernels.hpp"

#include <array>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace stokes {

struct Piece {
    Box box;
    std::vector<Expression> coefficients;
};

Bindings bind(Chart chart, const Point& p);
Variable chart_variable(Chart chart, int axis);
/// Euclidean volume per unit chart volume (r in the polar chart).
double jacobian(Chart chart, const Point& p);

class AnalyticForm {
public:
    /// Coefficients follow the basis order of GridComplex::axis_subsets.
    AnalyticForm(int degree, Chart chart, std::vector<Expression> coefficients, Box domain,
                 std::vector<Piece> pieces = {});

    /// c dvol (top degree) on `domain`.
    static AnalyticForm constant(const Box& domain, double value, Chart chart = Chart::cartesian);

    [[nodiscard]] int dimension() const noexcept { return domain_.dimension; }
    [[nodiscard]] int degree() const noexcept { return degree_; }
    [[nodiscard]] Chart chart() const noexcept { return chart_; }
    [[nodiscard]] const Box& domain() const noexcept { return domain_; }
    [[nodiscard]] const std::vector<Expression>& coefficients() const noexcept { return coefficients_; }
    [[nodiscard]] const std::vector<Piece>& pieces() const noexcept { return pieces_; }
    [[nodiscard]] bool piecewise() const noexcept { return !pieces_.empty(); }

    [[nodiscard]] std::vector<unsigned> basis() const;
    [[nodiscard]] std::size_t basis_index(unsigned axes) const;

    /// Coefficients in force at `p` (the first piece containing it).
    [[nodiscard]] const std::vector<Expression>& coefficients_at(const Point& p) const;
    [[nodiscard]] double coefficient(std::size_t basis, const Point& p) const;

private:
    int degree_;
    Chart chart_;
    std::vector<Expression> coefficients_;
    Box domain_;
    std::vector<Piece> pieces_;
};

AnalyticForm exterior_derivative(const AnalyticForm& form);

// --- region quadrature -----------------------------------------------------

/// One midpoint sub-grid: `resolution` cells per axis over `box`, evaluated
/// with one coefficient set. Piecewise forms yield one block per piece that
/// meets the region, so piece boundaries always fall on block edges.
struct QuadratureBlock {
    Box box;
    int resolution;
    const std::vector<Expression>* coefficients;

    [[nodiscard]] std::size_t sample_count() const;
    [[nodiscard]] double cell_volume() const;
    [[nodiscard]] Point midpoint(std::size_t sample) const;
};

/// Chart box of a Box or Annulus region (cell subsets are rejected).
Box region_chart_box(const RegionDescriptor& region, Chart chart);
std::vector<QuadratureBlock> quadrature_blocks(const AnalyticForm& form, const Box& region, int resolution);

/// Sum over all midpoint samples of f(top-degree coefficient, chart point,
/// chart cell volume); blocks and samples in a fixed order.
template <class F>
double reduce_top_degree(const AnalyticForm& form, const Box& region, int resolution, F&& f)
{
    double total = 0.0;
    for (const auto& block : quadrature_blocks(form, region, resolution)) {
        const auto& coeff = block.coefficients->front();
        const double dv = block.cell_volume();
        const Chart chart = form.chart();
        total += kernels::reduce_samples(block.sample_count(), static_cast<std::size_t>(block.resolution),
                                         [&](std::size_t i) {
                                             const Point p = block.midpoint(i);
                                             return f(coeff.evaluate(bind(chart, p)), p, dv);
                                         });
    }
    return total;
}

/// Midpoint rule for a top-degree form over a Box/Annulus region, with
/// `resolution` sub-cells per axis (per piece for piecewise forms).
double integrate_region(const AnalyticForm& form, const RegionDescriptor& region, bool absolute, int resolution);
/// Same rule through the serial reference kernel.
double integrate_region_serial(const AnalyticForm& form, const RegionDescriptor& region, bool absolute, int resolution);

// --- curves ----------------------------------------------------------------

struct Circle {
    std::array<double, 2> center{};
    double radius = 1.0;
    bool counterclockwise = true;
};

struct BoxPerimeter {
    Box box;
    bool counterclockwise = true;
};

using Curve = std::variant<Circle, BoxPerimeter>;

/// Outer circle counterclockwise, inner circle clockwise.
std::vector<Curve> annulus_boundary(const Annulus& annulus);

struct CurveSample {
    Point chart_point{};
    double pullback = 0.0;          // omega(dc/dt), per unit parameter
    double coordinate_length = 0.0; // dt
    double arclength = 0.0;         // |dc/dt| dt
};

/// Plane position and velocity at curve parameter t. Circles are
/// parametrized by angle, box perimeters by arclength from the lower-left
/// corner; both are periodic in t.
struct CurvePoint {
    std::array<double, 2> position{};
    std::array<double, 2> velocity{};
};
CurvePoint curve_point(const Curve& curve, double t);
double parameter_length(const Curve& curve);
/// Parameter of a plane point lying on the curve, if it does.
std::optional<double> curve_parameter(const Curve& curve, const std::array<double, 2>& position);

std::array<double, 2> to_plane(Chart chart, const Point& p);
/// Pullback sample of a planar 1-form at parameter t with weight dt.
CurveSample evaluate_on_curve(const AnalyticForm& form, const Curve& curve, double t, double dt);

/// Midpoint samples of the pullback: `resolution` per circle, `resolution`
/// per box side.
std::vector<CurveSample> sample_curve(const AnalyticForm& form, const Curve& curve, int resolution);
double integrate_curve(const AnalyticForm& form, const Curve& curve, int resolution);
double integrate_curves(const AnalyticForm& form, std::span<const Curve> curves, int resolution);

// --- cochains ----------------------------------------------------------------

class Cochain {
public:
    Cochain(GridComplex complex, int degree, std::vector<double> values);
    Cochain(GridComplex complex, int degree);

    [[nodiscard]] int degree() const noexcept { return degree_; }
    [[nodiscard]] const GridComplex& complex() const noexcept { return complex_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double value(std::size_t id) const { return values_.at(id); }
    void set(std::size_t id, double v) { values_.at(id) = v; }

    Cochain& operator*=(double factor);
    friend Cochain operator*(double f, Cochain c) { return c *= f; }
    bool operator==(const Cochain&) const = default;

private:
    GridComplex complex_;
    int degree_;
    std::vector<double> values_;
};

/// (d w)(s) = w(boundary s) on every (k+1)-cell s.
Cochain coboundary(const Cochain& form);
double pairing(const Cochain& form, const Chain& chain);

/// A cochain of degree n-1 whose coboundary is `top` (every top cochain on a
/// box is exact); supported on cells normal to axis 0.
Cochain top_primitive(const Cochain& top);

/// Cell integrals of the form with `quadrature` midpoints per extent axis.
Cochain discretize(const AnalyticForm& form, const GridComplex& complex, int quadrature);

} // namespace stokes
