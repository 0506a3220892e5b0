#include "stokes/forms.hpp"

#include "stokes/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace stokes {

namespace {

std::size_t binomial(int n, int k)
{
    std::size_t out = 1;
    for (int i = 1; i <= k; ++i) out = out * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
    return out;
}

std::vector<unsigned> basis_of(int dimension, int degree)
{
    std::vector<unsigned> out;
    for (unsigned axes = 0; axes < (1U << dimension); ++axes)
        if (std::popcount(axes) == degree) out.push_back(axes);
    return out;
}

void check_variables(const Expression& e, Chart chart, int dimension)
{
    for (std::size_t v = 0; v < variable_count; ++v) {
        const auto var = static_cast<Variable>(v);
        bool allowed = false;
        for (int axis = 0; axis < dimension; ++axis) allowed = allowed || chart_variable(chart, axis) == var;
        if (!allowed && e.depends_on(var))
            throw MismatchError("coefficient uses variable '" + std::string(variable_name(var))
                                + "' which is not a coordinate of the chart");
    }
}

Box intersect(const Box& a, const Box& b)
{
    Box out;
    out.dimension = a.dimension;
    for (int i = 0; i < a.dimension; ++i) {
        out.lo[i] = std::max(a.lo[i], b.lo[i]);
        out.hi[i] = std::min(a.hi[i], b.hi[i]);
    }
    return out;
}

bool has_volume(const Box& b)
{
    for (int i = 0; i < b.dimension; ++i) {
        const double scale = std::max({1.0, std::abs(b.lo[i]), std::abs(b.hi[i])});
        if (!(b.hi[i] - b.lo[i] > 1e-12 * scale)) return false;
    }
    return true;
}

double scale_of(const Box& b)
{
    double s = 1.0;
    for (int i = 0; i < b.dimension; ++i) s = std::max({s, std::abs(b.lo[i]), std::abs(b.hi[i])});
    return s;
}

} // namespace

Variable chart_variable(Chart chart, int axis)
{
    if (chart == Chart::polar) return axis == 0 ? Variable::r : Variable::theta;
    static constexpr Variable cartesian[] = {Variable::x, Variable::y, Variable::z};
    return cartesian[axis];
}

Bindings bind(Chart chart, const Point& p)
{
    Bindings b{};
    if (chart == Chart::polar) {
        b[static_cast<std::size_t>(Variable::r)] = p[0];
        b[static_cast<std::size_t>(Variable::theta)] = p[1];
    } else {
        b[static_cast<std::size_t>(Variable::x)] = p[0];
        b[static_cast<std::size_t>(Variable::y)] = p[1];
        b[static_cast<std::size_t>(Variable::z)] = p[2];
    }
    return b;
}

double jacobian(Chart chart, const Point& p) { return chart == Chart::polar ? p[0] : 1.0; }

AnalyticForm::AnalyticForm(int degree, Chart chart, std::vector<Expression> coefficients, Box domain,
                           std::vector<Piece> pieces)
    : degree_(degree), chart_(chart), coefficients_(std::move(coefficients)), domain_(domain), pieces_(std::move(pieces))
{
    const int n = domain_.dimension;
    validate_region(domain_);
    if (chart_ == Chart::polar && n != 2) throw InvalidGeometryError("polar chart requires dimension 2");
    if (degree_ < 0 || degree_ > n) throw DegreeError("form degree out of range");
    const std::size_t expected = binomial(n, degree_);
    auto check = [&](const std::vector<Expression>& coeffs) {
        if (coeffs.size() != expected)
            throw MismatchError("a degree-" + std::to_string(degree_) + " form in dimension " + std::to_string(n)
                                + " needs " + std::to_string(expected) + " coefficients, got "
                                + std::to_string(coeffs.size()));
        for (const auto& e : coeffs) check_variables(e, chart_, n);
    };
    if (pieces_.empty()) {
        check(coefficients_);
        return;
    }
    double covered = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const auto& piece = pieces_[i];
        validate_region(piece.box);
        if (!domain_.contains(piece.box)) throw DomainError("piece " + std::to_string(i) + " leaves the domain");
        check(piece.coefficients);
        for (std::size_t j = 0; j < i; ++j)
            if (has_volume(intersect(piece.box, pieces_[j].box)))
                throw InvalidGeometryError("pieces " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
        covered += piece.box.volume();
    }
    if (std::abs(covered - domain_.volume()) > 1e-9 * domain_.volume())
        throw InvalidGeometryError("pieces do not cover the domain");
    if (coefficients_.empty()) coefficients_ = pieces_.front().coefficients;
    check(coefficients_);
}

AnalyticForm AnalyticForm::constant(const Box& domain, double value, Chart chart)
{
    return AnalyticForm(domain.dimension, chart, {Expression::constant(value)}, domain);
}

std::vector<unsigned> AnalyticForm::basis() const { return basis_of(dimension(), degree_); }

std::size_t AnalyticForm::basis_index(unsigned axes) const
{
    const auto b = basis();
    const auto it = std::find(b.begin(), b.end(), axes);
    if (it == b.end()) throw DegreeError("axis subset is not a basis element of this degree");
    return static_cast<std::size_t>(it - b.begin());
}

const std::vector<Expression>& AnalyticForm::coefficients_at(const Point& p) const
{
    if (pieces_.empty()) return coefficients_;
    for (const auto& piece : pieces_)
        if (piece.box.contains(p)) return piece.coefficients;
    const double slack = 1e-9 * scale_of(domain_);
    for (const auto& piece : pieces_)
        if (piece.box.contains(p, slack)) return piece.coefficients;
    throw DomainError("point lies outside every piece");
}

double AnalyticForm::coefficient(std::size_t basis, const Point& p) const
{
    return coefficients_at(p).at(basis).evaluate(bind(chart_, p));
}

AnalyticForm exterior_derivative(const AnalyticForm& form)
{
    const int n = form.dimension();
    const int k = form.degree();
    if (k >= n) throw DegreeError("exterior derivative of a top-degree form");
    const auto source = basis_of(n, k);
    const auto target = basis_of(n, k + 1);

    auto differentiate_all = [&](const std::vector<Expression>& coeffs) {
        std::vector<Expression> out(target.size(), Expression::constant(0.0));
        for (std::size_t b = 0; b < source.size(); ++b) {
            const unsigned axes = source[b];
            for (int j = 0; j < n; ++j) {
                if ((axes >> j) & 1U) continue;
                // dx_j ^ dx_I = (-1)^{#I below j} dx_{I+j}
                const bool odd = std::popcount(axes & ((1U << j) - 1U)) % 2 == 1;
                const auto slot = static_cast<std::size_t>(
                    std::find(target.begin(), target.end(), axes | (1U << j)) - target.begin());
                const auto partial = coeffs[b].derivative(chart_variable(form.chart(), j));
                out[slot] = odd ? out[slot] - partial : out[slot] + partial;
            }
        }
        return out;
    };

    std::vector<Piece> pieces;
    for (const auto& piece : form.pieces()) pieces.push_back({piece.box, differentiate_all(piece.coefficients)});
    return AnalyticForm(k + 1, form.chart(), differentiate_all(form.coefficients()), form.domain(), std::move(pieces));
}

std::size_t QuadratureBlock::sample_count() const
{
    std::size_t n = 1;
    for (int i = 0; i < box.dimension; ++i) n *= static_cast<std::size_t>(resolution);
    return n;
}

double QuadratureBlock::cell_volume() const
{
    double v = 1.0;
    for (int i = 0; i < box.dimension; ++i) v *= (box.hi[i] - box.lo[i]) / resolution;
    return v;
}

Point QuadratureBlock::midpoint(std::size_t sample) const
{
    Point p{};
    for (int i = 0; i < box.dimension; ++i) {
        const auto j = sample % static_cast<std::size_t>(resolution);
        sample /= static_cast<std::size_t>(resolution);
        const double h = (box.hi[i] - box.lo[i]) / resolution;
        p[i] = box.lo[i] + (static_cast<double>(j) + 0.5) * h;
    }
    return p;
}

Box region_chart_box(const RegionDescriptor& region, Chart chart)
{
    if (const auto* box = std::get_if<Box>(&region)) return *box;
    if (const auto* annulus = std::get_if<Annulus>(&region)) {
        if (chart != Chart::polar) throw UnsupportedError("annulus regions need a form in the polar chart");
        return chart_box(*annulus);
    }
    throw UnsupportedError("cell-subset regions are integrated through a cochain (discretize)");
}

std::vector<QuadratureBlock> quadrature_blocks(const AnalyticForm& form, const Box& region, int resolution)
{
    if (resolution <= 0) throw ConfigError("resolution must be positive");
    if (region.dimension != form.dimension()) throw MismatchError("region dimension differs from the form's");
    if (!form.domain().contains(region)) throw DomainError("region lies outside the form's domain");
    std::vector<QuadratureBlock> blocks;
    if (!form.piecewise()) {
        blocks.push_back({region, resolution, &form.coefficients()});
        return blocks;
    }
    for (const auto& piece : form.pieces()) {
        const Box part = intersect(region, piece.box);
        if (has_volume(part)) blocks.push_back({part, resolution, &piece.coefficients});
    }
    return blocks;
}

double integrate_region(const AnalyticForm& form, const RegionDescriptor& region, bool absolute, int resolution)
{
    if (form.degree() != form.dimension()) throw DegreeError("region integrals need a top-degree form");
    const Box box = region_chart_box(region, form.chart());
    return reduce_top_degree(form, box, resolution, [absolute](double f, const Point&, double dv) {
        return (absolute ? std::abs(f) : f) * dv;
    });
}

double integrate_region_serial(const AnalyticForm& form, const RegionDescriptor& region, bool absolute, int resolution)
{
    if (form.degree() != form.dimension()) throw DegreeError("region integrals need a top-degree form");
    const Box box = region_chart_box(region, form.chart());
    double total = 0.0;
    for (const auto& block : quadrature_blocks(form, box, resolution)) {
        const auto& coeff = block.coefficients->front();
        const double dv = block.cell_volume();
        total += kernels::reduce_samples_serial(block.sample_count(), [&](std::size_t i) {
            const double f = coeff.evaluate(bind(form.chart(), block.midpoint(i)));
            return (absolute ? std::abs(f) : f) * dv;
        });
    }
    return total;
}

std::vector<Curve> annulus_boundary(const Annulus& annulus)
{
    make_annulus(annulus.inner, annulus.outer);
    return {Circle{{0.0, 0.0}, annulus.outer, true}, Circle{{0.0, 0.0}, annulus.inner, false}};
}

namespace {

std::array<std::array<double, 2>, 4> perimeter_corners(const BoxPerimeter& perimeter)
{
    const Box& b = perimeter.box;
    if (b.dimension != 2) throw UnsupportedError("box perimeters are supported in the plane only");
    std::array<std::array<double, 2>, 4> corners{{{b.lo[0], b.lo[1]}, {b.hi[0], b.lo[1]}, {b.hi[0], b.hi[1]}, {b.lo[0], b.hi[1]}}};
    if (!perimeter.counterclockwise) std::reverse(corners.begin() + 1, corners.end());
    return corners;
}

double side_length(const std::array<double, 2>& a, const std::array<double, 2>& c)
{
    return std::hypot(c[0] - a[0], c[1] - a[1]);
}

} // namespace

double parameter_length(const Curve& curve)
{
    if (std::holds_alternative<Circle>(curve)) return 2.0 * std::numbers::pi;
    const Box& b = std::get<BoxPerimeter>(curve).box;
    return 2.0 * ((b.hi[0] - b.lo[0]) + (b.hi[1] - b.lo[1]));
}

CurvePoint curve_point(const Curve& curve, double t)
{
    if (const auto* circle = std::get_if<Circle>(&curve)) {
        if (!(circle->radius > 0.0)) throw InvalidGeometryError("circle radius must be positive");
        const double orient = circle->counterclockwise ? 1.0 : -1.0;
        const double R = circle->radius;
        return {{circle->center[0] + R * std::cos(t), circle->center[1] + orient * R * std::sin(t)},
                {-R * std::sin(t), orient * R * std::cos(t)}};
    }
    const auto corners = perimeter_corners(std::get<BoxPerimeter>(curve));
    const double total = parameter_length(curve);
    t = std::fmod(t, total);
    if (t < 0.0) t += total;
    for (std::size_t side = 0; side < 4; ++side) {
        const auto& a = corners[side];
        const auto& c = corners[(side + 1) % 4];
        const double length = side_length(a, c);
        if (t <= length || side == 3) {
            const std::array<double, 2> unit{(c[0] - a[0]) / length, (c[1] - a[1]) / length};
            return {{a[0] + unit[0] * t, a[1] + unit[1] * t}, unit};
        }
        t -= length;
    }
    return {};
}

std::optional<double> curve_parameter(const Curve& curve, const std::array<double, 2>& position)
{
    if (const auto* circle = std::get_if<Circle>(&curve)) {
        const double dx = position[0] - circle->center[0];
        const double dy = position[1] - circle->center[1];
        if (std::abs(std::hypot(dx, dy) - circle->radius) > 1e-9 * std::max(1.0, circle->radius)) return std::nullopt;
        double t = std::atan2(circle->counterclockwise ? dy : -dy, dx);
        if (t < 0.0) t += 2.0 * std::numbers::pi;
        return t;
    }
    const auto corners = perimeter_corners(std::get<BoxPerimeter>(curve));
    double offset = 0.0;
    for (std::size_t side = 0; side < 4; ++side) {
        const auto& a = corners[side];
        const auto& c = corners[(side + 1) % 4];
        const double length = side_length(a, c);
        const double along = ((position[0] - a[0]) * (c[0] - a[0]) + (position[1] - a[1]) * (c[1] - a[1])) / length;
        const double across = ((position[0] - a[0]) * (c[1] - a[1]) - (position[1] - a[1]) * (c[0] - a[0])) / length;
        const double tol = 1e-9 * std::max(1.0, length);
        if (std::abs(across) <= tol && along >= -tol && along <= length + tol) return offset + along;
        offset += length;
    }
    return std::nullopt;
}

std::array<double, 2> to_plane(Chart chart, const Point& p)
{
    if (chart == Chart::polar) return {p[0] * std::cos(p[1]), p[0] * std::sin(p[1])};
    return {p[0], p[1]};
}

CurveSample evaluate_on_curve(const AnalyticForm& form, const Curve& curve, double t, double dt)
{
    if (form.dimension() != 2 || form.degree() != 1)
        throw DegreeError("curve integrals need a 1-form in the plane");
    const auto [position, plane_velocity] = curve_point(curve, t);
    const auto [x, y] = position;
    Point chart{};
    std::array<double, 2> velocity{};
    if (form.chart() == Chart::polar) {
        const double r = std::hypot(x, y);
        if (r == 0.0) throw SingularityError("curve passes through the polar origin");
        double theta = std::atan2(y, x);
        if (theta < 0.0) theta += 2.0 * std::numbers::pi;
        chart = {r, theta, 0.0};
        velocity = {(x * plane_velocity[0] + y * plane_velocity[1]) / r,
                    (x * plane_velocity[1] - y * plane_velocity[0]) / (r * r)};
    } else {
        chart = {x, y, 0.0};
        velocity = plane_velocity;
    }
    if (!form.domain().contains(chart, 1e-9 * scale_of(form.domain())))
        throw DomainError("curve leaves the form's domain");
    const auto& coeffs = form.coefficients_at(chart);
    const auto at = bind(form.chart(), chart);
    const double pullback = coeffs[0].evaluate(at) * velocity[0] + coeffs[1].evaluate(at) * velocity[1];
    const double speed = std::hypot(plane_velocity[0], plane_velocity[1]);
    return {chart, pullback, dt, speed * dt};
}

std::vector<CurveSample> sample_curve(const AnalyticForm& form, const Curve& curve, int resolution)
{
    if (resolution <= 0) throw ConfigError("resolution must be positive");
    std::vector<CurveSample> out;
    if (std::holds_alternative<Circle>(curve)) {
        const double dt = 2.0 * std::numbers::pi / resolution;
        for (int j = 0; j < resolution; ++j) out.push_back(evaluate_on_curve(form, curve, (j + 0.5) * dt, dt));
        return out;
    }
    validate_region(std::get<BoxPerimeter>(curve).box);
    const auto corners = perimeter_corners(std::get<BoxPerimeter>(curve));
    double offset = 0.0;
    for (std::size_t side = 0; side < 4; ++side) {
        const double length = side_length(corners[side], corners[(side + 1) % 4]);
        const double dt = length / resolution;
        for (int j = 0; j < resolution; ++j) out.push_back(evaluate_on_curve(form, curve, offset + (j + 0.5) * dt, dt));
        offset += length;
    }
    return out;
}

double integrate_curve(const AnalyticForm& form, const Curve& curve, int resolution)
{
    const auto samples = sample_curve(form, curve, resolution);
    return kernels::reduce_samples(samples.size(), static_cast<std::size_t>(resolution), [&](std::size_t i) {
        return samples[i].pullback * samples[i].coordinate_length;
    });
}

double integrate_curves(const AnalyticForm& form, std::span<const Curve> curves, int resolution)
{
    double total = 0.0;
    for (const auto& c : curves) total += integrate_curve(form, c, resolution);
    return total;
}

Cochain::Cochain(GridComplex complex, int degree, std::vector<double> values)
    : complex_(std::move(complex)), degree_(degree), values_(std::move(values))
{
    if (degree_ < 0 || degree_ > complex_.dimension()) throw DegreeError("cochain degree out of range");
    if (values_.size() != complex_.cell_count(degree_))
        throw MismatchError("cochain has " + std::to_string(values_.size()) + " values for "
                            + std::to_string(complex_.cell_count(degree_)) + " cells");
}

Cochain::Cochain(GridComplex complex, int degree)
    : Cochain(complex, degree, std::vector<double>(complex.cell_count(degree), 0.0))
{
}

Cochain& Cochain::operator*=(double factor)
{
    for (double& v : values_) v *= factor;
    return *this;
}

Cochain coboundary(const Cochain& form)
{
    const auto& complex = form.complex();
    const int k = form.degree();
    if (k >= complex.dimension()) throw DegreeError("coboundary of a top-degree cochain");
    Cochain out(complex, k + 1);
    std::vector<double> values(complex.cell_count(k + 1));
    kernels::fill_samples(values, [&](std::size_t id) {
        double v = 0.0;
        for (const auto& [face, sign] : complex.faces(complex.cell(k + 1, id)))
            v += sign * form.value(complex.cell_id(face));
        return v;
    });
    return Cochain(complex, k + 1, std::move(values));
}

double pairing(const Cochain& form, const Chain& chain)
{
    if (form.degree() != chain.degree()) throw DegreeError("pairing needs equal degrees");
    if (!(form.complex() == chain.complex())) throw MismatchError("pairing across different complexes");
    double total = 0.0;
    for (const auto& [id, coeff] : chain.terms()) total += static_cast<double>(coeff) * form.value(id);
    return total;
}

Cochain top_primitive(const Cochain& top)
{
    const auto& complex = top.complex();
    const int n = complex.dimension();
    if (top.degree() != n) throw DegreeError("primitive needs a top-degree cochain");
    const unsigned normal = ((1U << n) - 1U) & ~1U;
    Cochain out(complex, n - 1);
    for (std::size_t id = 0; id < complex.cell_count(n); ++id) {
        const Cell c = complex.cell(n, id);
        Cell lower{n - 1, c.index, normal};
        Cell upper = lower;
        upper.index[0] += 1;
        out.set(complex.cell_id(upper), out.value(complex.cell_id(lower)) + top.value(id));
    }
    return out;
}

Cochain discretize(const AnalyticForm& form, const GridComplex& complex, int quadrature)
{
    if (form.chart() != complex.chart()) throw MismatchError("form and complex use different charts");
    if (form.dimension() != complex.dimension()) throw MismatchError("form and complex differ in dimension");
    if (quadrature <= 0) throw ConfigError("quadrature must be positive");
    if (!form.domain().contains(complex.box())) throw DomainError("complex lies outside the form's domain");
    const int k = form.degree();
    const auto q = static_cast<std::size_t>(quadrature);
    std::size_t per_cell = 1;
    for (int i = 0; i < k; ++i) per_cell *= q;

    std::vector<double> values(complex.cell_count(k));
    kernels::fill_samples(values, [&](std::size_t id) {
        const Cell cell = complex.cell(k, id);
        const std::size_t basis = form.basis_index(cell.axes);
        const Point corner = complex.vertex(cell.index);
        const auto& spacing = complex.spacing();
        double sum = 0.0;
        for (std::size_t s = 0; s < per_cell; ++s) {
            Point p = corner;
            std::size_t rest = s;
            for (int i = 0; i < complex.dimension(); ++i) {
                if (!((cell.axes >> i) & 1U)) continue;
                p[i] += (static_cast<double>(rest % q) + 0.5) / quadrature * spacing[i];
                rest /= q;
            }
            sum += form.coefficient(basis, p);
        }
        return sum / static_cast<double>(per_cell) * complex.coordinate_volume(cell);
    });
    return Cochain(complex, k, std::move(values));
}

} // namespace stokes
