#include "stokes/oracles.hpp"

#include "stokes/errors.hpp"

#include <cmath>
#include <numbers>

namespace stokes {

namespace {

void check_positive(const RectangleParams& p)
{
    if (!(p.a > 0.0) || !(p.b > 0.0) || !(p.c > 0.0) || !(p.r > 0.0))
        throw ConfigError("rectangle parameters a, b, c, r must be positive");
}

} // namespace

RectangleResult rectangle_oracle(const RectangleParams& p, std::optional<double> order)
{
    check_positive(p);
    const double a = p.a, b = p.b, c = p.c, r = p.r;
    const double ab4 = 4.0 * a * b;
    RectangleResult out;
    out.z_y = ab4 * c;
    out.z_x = ab4 * c + ab4 * c / r;
    out.s_y = std::log(ab4);
    out.s_x = 1.0 / (1.0 + 1.0 / r) * std::log(ab4 + ab4 / r) + 1.0 / (1.0 + r) * std::log(ab4 + ab4 * r);
    out.delta_s = 1.0 / (1.0 + 1.0 / r) * std::log(1.0 + 1.0 / r) + 1.0 / (1.0 + r) * std::log(1.0 + r);
    out.mean_y = c;
    out.mean_x = 1.0 / (1.0 + 1.0 / r) * c + 1.0 / (1.0 + r) * (c / r);
    if (order) {
        const double q = *order;
        if (!(q >= 1.0)) throw ConfigError("mean order must be at least 1");
        out.order = q;
        // (int |f|^q p dx)^{1/q}: the Y-part carries weight 1/(1+1/r) at |f| = c,
        // the outer parts 1/(1+r) at |f| = c/r.
        out.mean_y_order = c;
        out.mean_x_order = std::pow(1.0 / (1.0 + 1.0 / r) * std::pow(c, q) + 1.0 / (1.0 + r) * std::pow(c / r, q), 1.0 / q);
    }
    return out;
}

Box rectangle_x(const RectangleParams& p)
{
    check_positive(p);
    const std::array lo{-2.0 * p.a, -p.b};
    const std::array hi{2.0 * p.a, p.b};
    return make_box(lo, hi);
}

Box rectangle_y(const RectangleParams& p)
{
    check_positive(p);
    const std::array lo{-p.a, -p.b};
    const std::array hi{p.a, p.b};
    return make_box(lo, hi);
}

AnalyticForm rectangle_form(const RectangleParams& p)
{
    check_positive(p);
    const double a = p.a, b = p.b;
    auto box = [](double x0, double y0, double x1, double y1) {
        const std::array lo{x0, y0};
        const std::array hi{x1, y1};
        return make_box(lo, hi);
    };
    std::vector<Piece> pieces{
        {box(-2.0 * a, -b, -a, b), {Expression::constant(-p.c / p.r)}},
        {box(-a, -b, a, b), {Expression::constant(p.c)}},
        {box(a, -b, 2.0 * a, b), {Expression::constant(p.c / p.r)}},
    };
    return AnalyticForm(2, Chart::cartesian, {}, rectangle_x(p), std::move(pieces));
}

AnnulusResult annulus_oracle(const AnnulusParams& p)
{
    if (!(p.inner > 0.0) || !(p.outer > p.inner)) throw ConfigError("annulus radii must satisfy 0 < inner < outer");
    const double ri = p.inner, ro = p.outer;
    const double two_pi = 2.0 * std::numbers::pi;
    AnnulusResult out;
    out.flux = two_pi * (ro - ri);
    out.r_b = ro - ri;
    out.s_boundary = ri * ri / (ro + ri) * std::log(two_pi * ro / ri + two_pi)
                     + ro * ro / (ro + ri) * std::log(two_pi * ri / ro + two_pi);
    out.s_circle = out.r_b * std::log(two_pi);
    out.delta_s = out.s_boundary - out.s_circle;
    out.delta_s_printed = ri * ri / (ro + ri) * std::log(two_pi * two_pi * ro / ri + two_pi * two_pi)
                          + ro * ro / (ro + ri) * std::log(ri / ro + 1.0);
    return out;
}

AnalyticForm annulus_form(const AnnulusParams& p)
{
    const Box domain = chart_box(make_annulus(p.inner, p.outer));
    return AnalyticForm(1, Chart::polar, {Expression::constant(0.0), Expression::variable(Variable::r)}, domain);
}

} // namespace stokes
