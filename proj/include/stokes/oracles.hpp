#pragma once

// Closed forms for the two worked examples: the three-piece rectangle form
// and r dtheta on an annulus. These are references for the numerical engine
// and are evaluated from their printed formulas.

#include "stokes/forms.hpp"

#include <optional>

namespace stokes {

/// f = c on Y = [-a,a]x[-b,b], +c/r on [a,2a]x[-b,b], -c/r on [-2a,-a]x[-b,b];
/// X = [-2a,2a]x[-b,b].
struct RectangleParams {
    double a = 1.0;
    double b = 1.0;
    double c = 1.0;
    double r = 1.0;
};

struct RectangleResult {
    double z_y = 0.0;
    double z_x = 0.0;
    double s_y = 0.0;
    double s_x = 0.0;
    double delta_s = 0.0;
    double mean_y = 0.0;
    double mean_x = 0.0;
    std::optional<double> order = {};
    std::optional<double> mean_y_order = {};
    std::optional<double> mean_x_order = {};
};

RectangleResult rectangle_oracle(const RectangleParams& p, std::optional<double> order = std::nullopt);

Box rectangle_x(const RectangleParams& p);
Box rectangle_y(const RectangleParams& p);
/// The piecewise top-degree form f dx^dy on X.
AnalyticForm rectangle_form(const RectangleParams& p);

struct AnnulusParams {
    double inner = 1.0;
    double outer = 2.0;
};

struct AnnulusResult {
    double flux = 0.0;
    double r_b = 0.0;
    double s_boundary = 0.0;
    double s_circle = 0.0;
    double delta_s = 0.0;
    /// The printed difference expression, evaluated independently of the
    /// subtraction s_boundary - s_circle.
    double delta_s_printed = 0.0;
};

AnnulusResult annulus_oracle(const AnnulusParams& p);

/// r dtheta on the annulus, polar chart.
AnalyticForm annulus_form(const AnnulusParams& p);

} // namespace stokes
