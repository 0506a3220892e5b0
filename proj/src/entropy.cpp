#include "stokes/entropy.hpp"

#include "stokes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace stokes {

std::string_view convention_name(Convention c)
{
    return c == Convention::intrinsic ? "intrinsic" : "coordinate";
}

Convention parse_convention(std::string_view text)
{
    if (text == "intrinsic") return Convention::intrinsic;
    if (text == "coordinate") return Convention::coordinate;
    throw ConfigError("unknown convention '" + std::string(text) + "' (expected intrinsic or coordinate)");
}

std::string_view method_name(EntropyMethod m)
{
    switch (m) {
    case EntropyMethod::direct: return "direct";
    case EntropyMethod::geometric_mean: return "geometric-mean";
    case EntropyMethod::closed_form: return "closed-form";
    }
    return "?";
}

namespace {

double plogp(double rho) { return rho > 0.0 ? rho * std::log(rho) : 0.0; }

void require_mass(double z)
{
    if (!(z > 0.0) || !std::isfinite(z)) throw NormalizationError("total mass of |form| is zero or not finite");
}

// Euclidean volume per unit of the convention's volume.
double convention_factor(Convention convention, Chart chart, const Point& p)
{
    return convention == Convention::intrinsic ? jacobian(chart, p) : 1.0;
}

} // namespace

double DensityField::sum_rho_measure() const
{
    double total = 0.0;
    for (const auto& s : samples) total += s.rho * s.measure;
    return total;
}

DensityField density_field(const AnalyticForm& form, const RegionDescriptor& region, Convention convention,
                           int resolution)
{
    if (form.degree() != form.dimension()) throw DegreeError("region densities need a top-degree form");
    const Box box = region_chart_box(region, form.chart());
    DensityField field;
    field.convention = convention;
    for (const auto& block : quadrature_blocks(form, box, resolution)) {
        const auto& coeff = block.coefficients->front();
        const double dv = block.cell_volume();
        const std::size_t first = field.samples.size();
        field.samples.resize(first + block.sample_count());
        std::vector<double> mass(block.sample_count());
        kernels::fill_samples(mass, [&](std::size_t i) {
            const Point p = block.midpoint(i);
            const double f = std::abs(coeff.evaluate(bind(form.chart(), p)));
            if (!std::isfinite(f)) throw SingularityError("form is singular inside the region");
            field.samples[first + i] = {p, f / convention_factor(convention, form.chart(), p), jacobian(form.chart(), p) * dv};
            return f * dv;
        });
        for (double m : mass) field.normalizer += m;
    }
    require_mass(field.normalizer);
    for (auto& s : field.samples) s.rho /= field.normalizer;
    return field;
}

DensityField density_field(const AnalyticForm& form, std::span<const Curve> curves, Convention convention,
                           int resolution)
{
    DensityField field;
    field.convention = convention;
    for (const auto& curve : curves) {
        for (const auto& s : sample_curve(form, curve, resolution)) {
            const double mass = std::abs(s.pullback) * s.coordinate_length;
            const double per = convention == Convention::intrinsic ? s.arclength : s.coordinate_length;
            field.samples.push_back({s.chart_point, mass / per, s.arclength});
            field.normalizer += mass;
        }
    }
    require_mass(field.normalizer);
    for (auto& s : field.samples) s.rho /= field.normalizer;
    return field;
}

DensityField density_field(const Cochain& form, const Chain& carrier, Convention convention)
{
    if (form.degree() != carrier.degree()) throw DegreeError("carrier degree differs from the cochain's");
    if (!(form.complex() == carrier.complex())) throw MismatchError("carrier lives on a different complex");
    const auto& complex = form.complex();
    DensityField field;
    field.convention = convention;
    for (const auto& [id, coeff] : carrier.terms()) {
        const Cell cell = complex.cell(form.degree(), id);
        const double multiplicity = static_cast<double>(std::llabs(coeff));
        const double mass = std::abs(form.value(id)) * multiplicity;
        const double per = complex.volume(cell, convention) * multiplicity;
        field.samples.push_back({complex.vertex(cell.index), mass / per, complex.intrinsic_volume(cell) * multiplicity});
        field.normalizer += mass;
    }
    require_mass(field.normalizer);
    for (auto& s : field.samples) s.rho /= field.normalizer;
    return field;
}

double entropy(const DensityField& field)
{
    double s = 0.0;
    for (const auto& sample : field.samples) s -= plogp(sample.rho) * sample.measure;
    return s;
}

namespace {

EntropyReport report_from(const DensityField& field, int resolution)
{
    EntropyReport r;
    r.entropy = entropy(field);
    r.normalizer = field.normalizer;
    r.convention = field.convention;
    r.resolution = resolution;
    r.method = EntropyMethod::direct;
    r.sum_rho_measure = field.sum_rho_measure();
    return r;
}

} // namespace

EntropyReport entropy_direct(const AnalyticForm& form, const RegionDescriptor& region, Convention convention,
                             int resolution)
{
    return report_from(density_field(form, region, convention, resolution), resolution);
}

EntropyReport entropy_direct(const AnalyticForm& form, std::span<const Curve> curves, Convention convention,
                             int resolution)
{
    return report_from(density_field(form, curves, convention, resolution), resolution);
}

EntropyReport entropy_direct(const Cochain& form, const Chain& carrier, Convention convention)
{
    const auto& shape = form.complex().shape();
    return report_from(density_field(form, carrier, convention), *std::max_element(shape.begin(), shape.end()));
}

double entropy_geometric_mean(std::span<const double> values, std::span<const double> measures)
{
    if (values.size() != measures.size()) throw MismatchError("values and measures differ in length");
    double z = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(measures[i] > 0.0)) throw InvalidGeometryError("cell measures must be positive");
        z += std::abs(values[i]) * measures[i];
    }
    require_mass(z);
    double log_g = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double c = std::abs(values[i]);
        if (c == 0.0) continue;
        log_g += (c * measures[i] / z) * std::log(z / c);
    }
    return log_g;
}

double unit_ball_volume(int dimension)
{
    switch (dimension) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    default: throw InvalidGeometryError("ball dimension must be 1, 2 or 3");
    }
}

double ball_volume(int dimension, double radius) { return unit_ball_volume(dimension) * std::pow(radius, dimension); }

namespace {

// Offsets of an equal-volume midpoint rule on the ball of radius eps: each of
// the returned points carries volume ball_volume / count. Constants integrate
// exactly.
std::vector<Point> ball_offsets(int dimension, double eps, int resolution)
{
    std::vector<Point> out;
    const int n = resolution;
    const double two_pi = 2.0 * std::numbers::pi;
    if (dimension == 1) {
        for (int i = 0; i < n; ++i) out.push_back({-eps + (i + 0.5) * 2.0 * eps / n, 0.0, 0.0});
    } else if (dimension == 2) {
        for (int i = 0; i < n; ++i) {
            const double rho = eps * std::sqrt((i + 0.5) / n);
            for (int j = 0; j < 2 * n; ++j) {
                const double phi = (j + 0.5) * two_pi / (2 * n);
                out.push_back({rho * std::cos(phi), rho * std::sin(phi), 0.0});
            }
        }
    } else {
        for (int i = 0; i < n; ++i) {
            const double rho = eps * std::cbrt((i + 0.5) / n);
            for (int j = 0; j < n; ++j) {
                const double w = -1.0 + (j + 0.5) * 2.0 / n;
                const double s = std::sqrt(1.0 - w * w);
                for (int k = 0; k < 2 * n; ++k) {
                    const double phi = (k + 0.5) * two_pi / (2 * n);
                    out.push_back({rho * s * std::cos(phi), rho * s * std::sin(phi), rho * w});
                }
            }
        }
    }
    return out;
}

} // namespace

double ball_mass(const AnalyticForm& form, const Point& x, double eps, int resolution, Convention convention)
{
    if (form.degree() != form.dimension()) throw DegreeError("ball mass needs a top-degree form");
    if (!(eps > 0.0)) throw ConfigError("ball radius must be positive");
    if (resolution <= 0) throw ConfigError("resolution must be positive");
    const int n = form.dimension();
    const Box& domain = form.domain();
    const bool euclidean = convention == Convention::intrinsic && form.chart() == Chart::polar;

    if (!euclidean) {
        for (int i = 0; i < n; ++i)
            if (x[i] - eps < domain.lo[i] - 1e-12 || x[i] + eps > domain.hi[i] + 1e-12)
                throw DomainError("ball leaves the form's domain");
    } else if (x[0] - eps < domain.lo[0] - 1e-12 || x[0] + eps > domain.hi[0] + 1e-12) {
        throw DomainError("ball leaves the form's domain");
    }

    const auto offsets = ball_offsets(n, eps, resolution);
    const double weight = ball_volume(n, eps) / static_cast<double>(offsets.size());
    const auto centre = to_plane(form.chart(), x);
    const double total = kernels::reduce_samples(offsets.size(), offsets.size() / static_cast<std::size_t>(resolution),
                                                 [&](std::size_t i) {
        Point p{};
        double per_volume = 1.0; // converts |coefficient| to mass per unit ball volume
        if (euclidean) {
            const double px = centre[0] + offsets[i][0];
            const double py = centre[1] + offsets[i][1];
            double theta = std::atan2(py, px);
            if (theta < 0.0) theta += 2.0 * std::numbers::pi;
            p = {std::hypot(px, py), theta, 0.0};
            per_volume = 1.0 / p[0];
        } else {
            for (int d = 0; d < n; ++d) p[d] = x[d] + offsets[i][d];
        }
        if (!domain.contains(p, 1e-12)) throw DomainError("ball leaves the form's domain");
        const double f = std::abs(form.coefficient(0, p));
        if (!std::isfinite(f)) throw SingularityError("form is singular inside the ball");
        return f * per_volume * weight;
    });
    return total;
}

double alpha_ball_radius(const AnalyticForm& form, const Point& x, double eps, int resolution)
{
    const double mass = ball_mass(form, x, eps, resolution);
    if (!(mass > 0.0)) throw NormalizationError("zero ball mass: the (alpha, eps)-ball radius is undefined");
    return std::pow(mass / unit_ball_volume(form.dimension()), 1.0 / form.dimension());
}

std::vector<double> halving_schedule(double eps0, int steps)
{
    std::vector<double> out;
    for (int k = 0; k < steps; ++k) out.push_back(std::ldexp(eps0, -k));
    return out;
}

namespace {

void check_schedule(std::span<const double> schedule)
{
    if (schedule.empty()) throw ConfigError("empty epsilon schedule");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 0.0)) throw ConfigError("epsilon schedule entries must be positive");
        if (i > 0 && !(schedule[i] < schedule[i - 1])) throw ConfigError("epsilon schedule must decrease");
    }
}

// Richardson extrapolation of an O(eps^2) sequence.
DensityEstimate extrapolate(std::vector<double> quotients, std::span<const double> schedule, double tolerance)
{
    DensityEstimate est;
    est.quotients = std::move(quotients);
    const auto& q = est.quotients;
    const std::size_t n = q.size();
    auto rich = [&](std::size_t k) {
        const double ratio = schedule[k - 1] / schedule[k];
        const double f = ratio * ratio;
        return (f * q[k] - q[k - 1]) / (f - 1.0);
    };
    auto relative = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); };
    if (n == 1) {
        est.value = q[0];
        est.residual = 0.0;
    } else if (n == 2) {
        est.value = rich(1);
        est.residual = relative(q[1], q[0]);
    } else {
        est.value = rich(n - 1);
        est.residual = relative(est.value, rich(n - 2));
    }
    if (est.value == 0.0 && q.back() == 0.0) est.residual = 0.0;
    if (!(est.residual <= tolerance))
        throw NoLimitError("ball averages do not settle: relative residual " + std::to_string(est.residual));
    return est;
}

} // namespace

DensityEstimate density_at(const AnalyticForm& form, const RegionDescriptor& region, const Point& x,
                           Convention convention, std::span<const double> schedule, int resolution, double tolerance)
{
    check_schedule(schedule);
    if (form.degree() != form.dimension()) throw DegreeError("region densities need a top-degree form");
    const Box box = region_chart_box(region, form.chart());
    if (!box.contains(x)) throw DomainError("point lies outside the region");
    const double at = form.coefficient(0, x);
    if (!std::isfinite(at) || !form.coefficients_at(x).front().smooth_at(bind(form.chart(), x)))
        throw SingularityError("form is singular at the requested point");
    const double z = integrate_region(form, region, true, resolution);
    require_mass(z);

    std::vector<double> quotients;
    for (double eps : schedule) {
        const double mass = ball_mass(form, x, eps, resolution, convention);
        quotients.push_back(mass / (ball_volume(form.dimension(), eps) * z));
    }
    return extrapolate(std::move(quotients), schedule, tolerance);
}

DensityEstimate density_at(const AnalyticForm& form, std::span<const Curve> curves, const Point& x,
                           Convention convention, std::span<const double> schedule, int resolution, double tolerance)
{
    check_schedule(schedule);
    const auto position = to_plane(form.chart(), x);
    const Curve* host = nullptr;
    double t0 = 0.0;
    for (const auto& c : curves) {
        if (const auto t = curve_parameter(c, position)) {
            host = &c;
            t0 = *t;
            break;
        }
    }
    if (host == nullptr) throw DomainError("point does not lie on any of the curves");

    double z = 0.0;
    for (const auto& c : curves)
        for (const auto& s : sample_curve(form, c, resolution)) z += std::abs(s.pullback) * s.coordinate_length;
    require_mass(z);

    const auto centre = evaluate_on_curve(form, *host, t0, 1.0);
    if (!std::isfinite(centre.pullback)) throw SingularityError("form is singular at the requested point");
    const double speed = centre.arclength;
    if (!(speed > 0.0)) throw SingularityError("curve is degenerate at the requested point");

    std::vector<double> quotients;
    for (double eps : schedule) {
        // Arc of arclength 2*eps; curves here have constant speed.
        const double half = eps / speed;
        const double dt = 2.0 * half / resolution;
        double mass = 0.0;
        for (int j = 0; j < resolution; ++j) {
            const auto s = evaluate_on_curve(form, *host, t0 - half + (j + 0.5) * dt, dt);
            mass += std::abs(s.pullback) * dt;
        }
        const double measure = convention == Convention::intrinsic ? 2.0 * eps : 2.0 * half;
        quotients.push_back(mass / (measure * z));
    }
    return extrapolate(std::move(quotients), schedule, tolerance);
}

double generalized_mean(const AnalyticForm& form, const RegionDescriptor& region, Convention convention, double p,
                        int resolution)
{
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("generalized mean order must be a real p >= 1");
    if (form.degree() != form.dimension()) throw DegreeError("generalized means need a top-degree form");
    const Box box = region_chart_box(region, form.chart());
    const Chart chart = form.chart();
    const double z = reduce_top_degree(form, box, resolution, [](double f, const Point&, double dv) { return std::abs(f) * dv; });
    require_mass(z);
    // Weights rho * (convention volume) sum to one; the averaged quantity is
    // |coefficient| per convention volume.
    const double moment = reduce_top_degree(form, box, resolution, [&](double f, const Point& pt, double dv) {
        const double j = convention_factor(convention, chart, pt);
        const double v = std::abs(f) / j;
        return std::pow(v, p) * (v / z) * j * dv;
    });
    return std::pow(moment, 1.0 / p);
}

} // namespace stokes
