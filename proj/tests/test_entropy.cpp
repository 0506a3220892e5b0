#include "helpers.hpp"
#include "stokes/entropy.hpp"
#include "stokes/errors.hpp"
#include "stokes/oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace stokes;

namespace {

constexpr double pi = std::numbers::pi;

/// Random piecewise-constant top form on `box`, split into a w x h grid of pieces.
AnalyticForm random_pieces(const Box& box, int w, int h, std::mt19937_64& rng, std::vector<double>* values = nullptr)
{
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<Piece> pieces;
    const double dx = (box.hi[0] - box.lo[0]) / w, dy = (box.hi[1] - box.lo[1]) / h;
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i) {
            const double v = u(rng);
            if (values) values->push_back(v);
            pieces.push_back({test::box2(box.lo[0] + i * dx, box.lo[1] + j * dy, box.lo[0] + (i + 1) * dx,
                                         box.lo[1] + (j + 1) * dy),
                              {Expression::constant(v)}});
        }
    return AnalyticForm(2, Chart::cartesian, {}, box, std::move(pieces));
}

} // namespace

TEST_CASE("ball mass")
{
    const Box b = test::box2(-1, -1, 1, 1);
    const Point o{0.1, -0.2, 0};
    CHECK(ball_mass(AnalyticForm::constant(b, 1.0), o, 0.1) == doctest::Approx(pi * 0.01).epsilon(1e-6));
    CHECK(ball_mass(AnalyticForm::constant(b, 4.0), o, 0.1) == doctest::Approx(4 * pi * 0.01).epsilon(1e-6));

    const RectangleParams p{1, 1, 2, 3};
    CHECK(ball_mass(rectangle_form(p), Point{0.2, 0.3, 0}, 0.05)
          == doctest::Approx(p.c * pi * 0.0025).epsilon(1e-6));

    const Box cube = test::box3(0, 0, 0, 1, 1, 1);
    CHECK(ball_mass(AnalyticForm::constant(cube, 1.0), Point{0.5, 0.5, 0.5}, 0.2)
          == doctest::Approx(4.0 / 3.0 * pi * 0.008).epsilon(1e-6));

    CHECK_THROWS_AS(ball_mass(AnalyticForm::constant(b, 1.0), Point{0.95, 0, 0}, 0.1), DomainError);
    CHECK_THROWS(ball_mass(AnalyticForm::constant(b, 1.0), o, 0.0));
}

TEST_CASE("alpha-ball radius")
{
    const Box b = test::box2(-1, -1, 1, 1);
    const Point o{0, 0, 0};
    CHECK(std::abs(alpha_ball_radius(AnalyticForm::constant(b, 1.0), o, 0.1) - 0.1) <= 1e-9);
    CHECK(std::abs(alpha_ball_radius(AnalyticForm::constant(b, 4.0), o, 0.1) - 0.2) <= 1e-9);
    const Box cube = test::box3(-1, -1, -1, 1, 1, 1);
    CHECK(std::abs(alpha_ball_radius(AnalyticForm::constant(cube, 27.0), o, 0.1) - 0.3) <= 1e-9);
    CHECK_THROWS_AS(alpha_ball_radius(AnalyticForm::constant(b, 0.0), o, 0.1), NormalizationError);

    // Homogeneity: scaling alpha by lambda^n scales eps_alpha by lambda.
    const AnalyticForm f(2, Chart::cartesian, {parse_expression("1 + x^2 + y")}, b);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> lam(1e-3, 10.0);
    const Point x{0.1, 0.2, 0};
    const double base = alpha_ball_radius(f, x, 0.2);
    for (int i = 0; i < 20; ++i) {
        const double l = lam(rng);
        const AnalyticForm g(2, Chart::cartesian, {Expression::constant(l * l) * f.coefficients().front()}, b);
        CHECK(std::abs(alpha_ball_radius(g, x, 0.2) - l * base) <= 1e-9 * std::max(1.0, l));
    }

    // Larger where there is more mass.
    CHECK(alpha_ball_radius(f, Point{0.5, 0.5, 0}, 0.2) > alpha_ball_radius(f, Point{0.0, -0.5, 0}, 0.2));
}

TEST_CASE("density at a point")
{
    const auto schedule = halving_schedule(0.05);
    const Box b = test::box2(0, 0, 2, 3);
    const auto uniform = density_at(AnalyticForm::constant(b, 5.0), b, Point{1.0, 1.5, 0}, Convention::intrinsic, schedule);
    CHECK(uniform.value == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
    CHECK(uniform.quotients.size() == 7);

    const RectangleParams p{1, 0.5, 2, 4};
    const auto rect = density_at(rectangle_form(p), rectangle_x(p), Point{0.3, 0.1, 0}, Convention::intrinsic, schedule);
    CHECK(rect.value == doctest::Approx(1.0 / (4 * p.a * p.b + 4 * p.a * p.b / p.r)).epsilon(1e-9));

    // Smooth coefficient: |f(x)| / Z.
    const Box unit = test::box2(0, 0, 1, 1);
    const AnalyticForm smooth(2, Chart::cartesian, {parse_expression("1 + x^2")}, unit);
    const auto s = density_at(smooth, unit, Point{0.5, 0.5, 0}, Convention::intrinsic, halving_schedule(0.2), 256);
    CHECK(s.value == doctest::Approx(1.25 / (4.0 / 3.0)).epsilon(1e-4));
    CHECK(s.residual < default_limit_tolerance);

    // Outer circle of the annulus, coordinate convention: r_o / (2 pi (r_o + r_i)).
    const AnnulusParams ap{1, 2};
    const auto boundary = annulus_boundary(make_annulus(1, 2));
    const auto outer = density_at(annulus_form(ap), boundary, Point{2.0, 1.0, 0}, Convention::coordinate, schedule);
    CHECK(outer.value == doctest::Approx(2.0 / (2 * pi * 3.0)).epsilon(1e-9));
    const auto inner = density_at(annulus_form(ap), boundary, Point{1.0, 4.0, 0}, Convention::coordinate, schedule);
    CHECK(inner.value == doctest::Approx(1.0 / (2 * pi * 3.0)).epsilon(1e-9));
}

TEST_CASE("density errors")
{
    const auto schedule = halving_schedule(0.05);
    const Box unit = test::box2(0, 0, 1, 1);
    CHECK_THROWS_AS(density_at(AnalyticForm::constant(unit, 0.0), unit, Point{0.5, 0.5, 0}, Convention::intrinsic, schedule),
                    NormalizationError);
    const AnalyticForm kink(2, Chart::cartesian, {parse_expression("abs(x - 0.5) + 1")}, unit);
    CHECK_THROWS_AS(density_at(kink, unit, Point{0.5, 0.5, 0}, Convention::intrinsic, schedule), SingularityError);
    const AnalyticForm wild(2, Chart::cartesian, {parse_expression("2 + sin(1000*x)")}, unit);
    CHECK_THROWS_AS(density_at(wild, unit, Point{0.5, 0.5, 0}, Convention::intrinsic, halving_schedule(0.1), 64),
                    NoLimitError);
    try {
        density_at(wild, unit, Point{0.5, 0.5, 0}, Convention::intrinsic, halving_schedule(0.1), 64);
    } catch (const Error& e) {
        CHECK(e.numerical());
    }
}

TEST_CASE("entropy examples")
{
    const Box b = test::box2(0, 0, 2, 2);
    CHECK(entropy_direct(AnalyticForm::constant(b, 3.0), b, Convention::intrinsic, 8).entropy
          == doctest::Approx(std::log(4.0)).epsilon(1e-12));

    const RectangleParams p{0.5, 0.5, 1, 1};
    const auto f = rectangle_form(p);
    CHECK(std::abs(entropy_direct(f, rectangle_y(p), Convention::intrinsic, 4).entropy - 0.0) <= 1e-12);
    CHECK(std::abs(entropy_direct(f, rectangle_x(p), Convention::intrinsic, 4).entropy - std::log(2.0)) <= 1e-12);

    CHECK_THROWS_AS(entropy_direct(AnalyticForm::constant(b, 0.0), b, Convention::intrinsic, 8), NormalizationError);
}

TEST_CASE("geometric-mean entropy")
{
    const std::vector<double> ones{1, 1};
    CHECK(entropy_geometric_mean(std::vector<double>{1, 1}, ones) == doctest::Approx(std::log(2.0)));
    CHECK(entropy_geometric_mean(std::vector<double>{1, 0}, ones) == 0.0);
    CHECK_THROWS_AS(entropy_geometric_mean(std::vector<double>{0, 0}, ones), NormalizationError);
    CHECK_THROWS(entropy_geometric_mean(std::vector<double>{1}, ones));

    const RectangleParams p{0.5, 0.5, 1, 2};
    const double ab = p.a * p.b;
    const std::vector<double> c{p.c, p.c / p.r, p.c / p.r};
    const std::vector<double> v{4 * ab, 2 * ab, 2 * ab};
    CHECK(std::abs(entropy_geometric_mean(c, v) - rectangle_oracle(p).s_x) <= 1e-12);
}

TEST_CASE("geometric mean equals the direct route on piecewise-constant forms")
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> n(1, 5);
    for (int trial = 0; trial < 200; ++trial) {
        const Box box = test::box2(0, 0, 1 + trial % 3, 2);
        const int w = n(rng), h = n(rng);
        std::vector<double> values;
        const auto f = random_pieces(box, w, h, rng, &values);
        const double cell = (box.hi[0] - box.lo[0]) * (box.hi[1] - box.lo[1]) / (w * h);
        const std::vector<double> measures(values.size(), cell);
        const double direct = entropy_direct(f, box, Convention::intrinsic, 2).entropy;
        REQUIRE(std::abs(direct - entropy_geometric_mean(values, measures)) <= 1e-12);
    }
}

TEST_CASE("cochain densities")
{
    std::mt19937_64 rng(5);
    const auto c = test::grid(4, 3);
    const Cochain top(c, 2, test::random_values(c.cell_count(2), rng, false));
    const auto field = density_field(top, full_chain(c), Convention::intrinsic);
    CHECK(std::abs(field.sum_rho_measure() - 1.0) <= 1e-12);
    std::vector<double> vals(top.values().begin(), top.values().end());
    const std::vector<double> ones(vals.size(), 1.0);
    CHECK(std::abs(entropy_direct(top, full_chain(c), Convention::intrinsic).entropy - entropy_geometric_mean(vals, ones))
          <= 1e-12);
}

TEST_CASE("normalization of density fields")
{
    std::mt19937_64 rng(3);
    const Box box = test::box2(-1, 0, 2, 1);
    for (int trial = 0; trial < 100; ++trial) {
        const auto f = random_pieces(box, 1 + trial % 4, 1 + trial % 3, rng);
        REQUIRE(std::abs(density_field(f, box, Convention::intrinsic, 6).sum_rho_measure() - 1.0) <= 1e-9);
    }
    const AnalyticForm smooth(2, Chart::polar, {parse_expression("r^2 + sin(theta)")}, chart_box(make_annulus(1, 3)));
    CHECK(std::abs(density_field(smooth, make_annulus(1, 3), Convention::intrinsic, 64).sum_rho_measure() - 1.0) <= 1e-9);
}

TEST_CASE("the constant form maximizes entropy on a fixed region")
{
    std::mt19937_64 rng(21);
    const Box box = test::box2(0, 0, 3, 2);
    const double top = std::log(6.0);
    CHECK(std::abs(entropy_direct(AnalyticForm::constant(box, 1.0), box, Convention::intrinsic, 5).entropy - top) <= 1e-9);
    for (int trial = 0; trial < 100; ++trial) {
        const auto f = random_pieces(box, 3, 2, rng);
        REQUIRE(entropy_direct(f, box, Convention::intrinsic, 3).entropy <= top + 1e-9);
    }
}

TEST_CASE("generalized means")
{
    for (double p : {1.0, 2.0, 3.0}) {
        const RectangleParams rp{1, 1, 2, 3};
        CHECK(generalized_mean(rectangle_form(rp), rectangle_y(rp), Convention::intrinsic, p, 4)
              == doctest::Approx(rp.c).epsilon(1e-12));
    }
    const RectangleParams one{1, 1, 2, 1};
    CHECK(generalized_mean(rectangle_form(one), rectangle_x(one), Convention::intrinsic, 1, 4)
          == doctest::Approx(2.0).epsilon(1e-12));
    const RectangleParams two{1, 1, 1, 2};
    CHECK(generalized_mean(rectangle_form(two), rectangle_x(two), Convention::intrinsic, 1, 4)
          == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK_THROWS(generalized_mean(rectangle_form(two), rectangle_x(two), Convention::intrinsic, 0.5, 4));
}

TEST_CASE("means do not follow the entropy ordering")
{
    for (double p : {1.0, 2.0, 3.0}) {
        for (double r : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
            const RectangleParams rp{0.7, 1.3, 2.5, r};
            const auto f = rectangle_form(rp);
            const double y = generalized_mean(f, rectangle_y(rp), Convention::intrinsic, p, 4);
            const double x = generalized_mean(f, rectangle_x(rp), Convention::intrinsic, p, 4);
            CAPTURE(p);
            CAPTURE(r);
            if (r == 1.0) CHECK(std::abs(y - x) <= 1e-12);
            else if (r > 1.0) CHECK(y > x);
            else CHECK(y < x);
            // The entropy ordering holds regardless.
            CHECK(entropy_direct(f, rectangle_y(rp), Convention::intrinsic, 4).entropy
                  <= entropy_direct(f, rectangle_x(rp), Convention::intrinsic, 4).entropy);
        }
    }
}

TEST_CASE("entropy is continuous as a cell value vanishes")
{
    const std::vector<double> measures{1, 1, 1};
    const double limit = entropy_geometric_mean(std::vector<double>{1, 2, 0}, measures);
    double previous = 1e300;
    for (int k = 1; k <= 12; ++k) {
        const double diff = std::abs(entropy_geometric_mean(std::vector<double>{1, 2, std::pow(10.0, -k)}, measures) - limit);
        CHECK(diff < previous);
        previous = diff;
    }
    CHECK(previous < 1e-9);
}

TEST_CASE("annulus reproduction under the mixed convention")
{
    const AnnulusParams p{1, 2};
    const auto oracle = annulus_oracle(p);
    const auto w = annulus_form(p);
    const auto boundary = annulus_boundary(make_annulus(1, 2));
    const double s_boundary = entropy_direct(w, boundary, Convention::coordinate, 256).entropy;
    CHECK(std::abs(s_boundary - oracle.s_boundary) <= 1e-3 * oracle.s_boundary);
    const std::vector<Curve> circle{Circle{{0, 0}, oracle.r_b, true}};
    const double s_circle = entropy_direct(w, circle, Convention::coordinate, 256).entropy;
    CHECK(std::abs(s_circle - oracle.s_circle) <= 1e-3 * oracle.s_circle);

    // Under the intrinsic convention both curves carry normalized densities.
    const auto field = density_field(w, boundary, Convention::intrinsic, 256);
    CHECK(std::abs(field.sum_rho_measure() - 1.0) <= 1e-9);
    // The mixed convention does not normalize: sum rho * arclength != 1.
    CHECK(std::abs(density_field(w, boundary, Convention::coordinate, 256).sum_rho_measure() - 1.0) > 0.1);
}

TEST_CASE("scaling a form leaves its entropy unchanged")
{
    const Box b = test::box2(0, 0, 1, 2);
    const AnalyticForm f(2, Chart::cartesian, {parse_expression("1 + x*y + sin(y)")}, b);
    const double base = entropy_direct(f, b, Convention::intrinsic, 40).entropy;
    for (double l : {0.5, 3.0, -2.0}) {
        const AnalyticForm g(2, Chart::cartesian, {Expression::constant(l) * f.coefficients().front()}, b);
        CHECK(entropy_direct(g, b, Convention::intrinsic, 40).entropy == doctest::Approx(base).epsilon(1e-12));
    }
}
