#include "stokes/cli.hpp"

#include "stokes/duality.hpp"
#include "stokes/entropy.hpp"
#include "stokes/errors.hpp"
#include "stokes/kernels.hpp"
#include "stokes/oracles.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace stokes {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view text)
{
    text = trim(text);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty())
        throw ConfigError("expected a number, got '" + std::string(text) + "'");
    return value;
}

std::vector<double> parse_numbers(std::string_view text)
{
    std::vector<double> out;
    for (auto part : split(text, ',')) out.push_back(parse_number(part));
    return out;
}

bool starts_with(std::string_view s, std::string_view prefix)
{
    return s.substr(0, prefix.size()) == prefix;
}

std::pair<std::string_view, std::string_view> head(std::string_view spec)
{
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw ConfigError("expected kind:arguments, got '" + std::string(spec) + "'");
    return {spec.substr(0, colon), spec.substr(colon + 1)};
}

Box box_from_numbers(const std::vector<double>& v)
{
    if (v.empty() || v.size() % 2 != 0 || v.size() > 6)
        throw ConfigError("a box needs 2, 4 or 6 numbers (lower corner, then upper corner)");
    const std::size_t n = v.size() / 2;
    return make_box(std::span(v).first(n), std::span(v).last(n));
}

Chart parse_chart(std::string_view text)
{
    if (text == "cartesian") return Chart::cartesian;
    if (text == "polar") return Chart::polar;
    throw ConfigError("unknown chart '" + std::string(text) + "' (expected cartesian or polar)");
}

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError("malformed JSON in '" + path + "': " + e.what());
    }
}

std::vector<double> json_numbers(const Json& j, const char* what)
{
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError(std::string(what) + " must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<Expression> json_coefficients(const Json& j)
{
    if (!j.is_array()) throw ConfigError("coefficients must be an array");
    std::vector<Expression> out;
    for (const auto& v : j) {
        if (v.is_number()) out.push_back(Expression::constant(v.get<double>()));
        else if (v.is_string()) out.push_back(parse_expression(v.get<std::string>()));
        else throw ConfigError("coefficients must be numbers or expression strings");
    }
    return out;
}

Box bounding_box(const std::vector<Curve>& curves, Chart chart)
{
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    double rmin = 1e300, rmax = 0.0;
    for (const auto& c : curves) {
        if (const auto* circle = std::get_if<Circle>(&c)) {
            x0 = std::min(x0, circle->center[0] - circle->radius);
            x1 = std::max(x1, circle->center[0] + circle->radius);
            y0 = std::min(y0, circle->center[1] - circle->radius);
            y1 = std::max(y1, circle->center[1] + circle->radius);
            const double d = std::hypot(circle->center[0], circle->center[1]);
            rmin = std::min(rmin, std::max(0.0, circle->radius - d));
            rmax = std::max(rmax, circle->radius + d);
        } else {
            const auto& b = std::get<BoxPerimeter>(c).box;
            x0 = std::min(x0, b.lo[0]);
            x1 = std::max(x1, b.hi[0]);
            y0 = std::min(y0, b.lo[1]);
            y1 = std::max(y1, b.hi[1]);
            rmax = std::max({rmax, std::hypot(b.lo[0], b.lo[1]), std::hypot(b.hi[0], b.hi[1]),
                             std::hypot(b.lo[0], b.hi[1]), std::hypot(b.hi[0], b.lo[1])});
            rmin = 0.0;
        }
    }
    if (chart == Chart::polar) {
        if (!(rmin > 0.0)) throw ConfigError("polar forms need curves that stay away from the origin");
        const std::array lo{rmin, 0.0};
        const std::array hi{rmax, 2.0 * std::numbers::pi};
        if (rmax - rmin < 1e-12 * rmax) {
            const std::array wlo{0.5 * rmin, 0.0};
            const std::array whi{1.5 * rmax, 2.0 * std::numbers::pi};
            return make_box(wlo, whi);
        }
        return make_box(lo, hi);
    }
    const std::array lo{x0, y0};
    const std::array hi{x1, y1};
    return make_box(lo, hi);
}

Box region_box(const RegionDescriptor& region, Chart chart)
{
    if (const auto* a = std::get_if<Annulus>(&region)) {
        if (chart == Chart::polar) return chart_box(*a);
        const std::array lo{-a->outer, -a->outer};
        const std::array hi{a->outer, a->outer};
        return make_box(lo, hi);
    }
    if (const auto* b = std::get_if<Box>(&region)) return *b;
    throw UnsupportedError("cell-subset regions are not available from the command line");
}

Box hull(const Box& a, const Box& b)
{
    if (a.dimension != b.dimension) throw MismatchError("region and candidate dimensions differ");
    Box out = a;
    for (int i = 0; i < a.dimension; ++i) {
        out.lo[i] = std::min(a.lo[i], b.lo[i]);
        out.hi[i] = std::max(a.hi[i], b.hi[i]);
    }
    return out;
}

std::vector<Curve> region_boundary(const RegionDescriptor& region)
{
    if (const auto* a = std::get_if<Annulus>(&region)) return annulus_boundary(*a);
    if (const auto* b = std::get_if<Box>(&region)) {
        if (b->dimension != 2) throw UnsupportedError("boundary curves exist for planar regions only");
        return {BoxPerimeter{*b, true}};
    }
    throw UnsupportedError("cell-subset regions are not available from the command line");
}

Chart default_chart(const ExperimentConfig& config)
{
    if (starts_with(config.region, "annulus:") || starts_with(config.region, "annulus-boundary:")) return Chart::polar;
    return Chart::cartesian;
}

/// Chart named inside the form spec, or `fallback` when it names none.
Chart form_chart(std::string_view spec, Chart fallback)
{
    const auto [kind, rest] = head(spec);
    if (kind == "expr") {
        const auto parts = split(rest, ':');
        if (parts.size() < 3) throw ConfigError("expr forms read expr:<degree>:<chart>:<coefficients>");
        return parse_chart(trim(parts[1]));
    }
    if (kind == "piecewise") {
        if (!starts_with(rest, "@")) throw ConfigError("piecewise forms read piecewise:@file");
        const Json j = read_json_file(std::string(rest.substr(1)));
        return j.contains("chart") ? parse_chart(j.at("chart").get<std::string>()) : fallback;
    }
    return fallback;
}

AnalyticForm form_for(const ExperimentConfig& config, const Box* extra)
{
    if (config.form.empty()) throw ConfigError("--form is required");
    const Chart chart = form_chart(config.form, default_chart(config));
    Box domain;
    if (!config.domain.empty()) {
        const auto [kind, rest] = head(config.domain);
        if (kind != "box") throw ConfigError("--domain takes box:...");
        domain = box_from_numbers(parse_numbers(rest));
    } else {
        if (config.region.empty()) throw ConfigError("--region is required");
        domain = is_curve_spec(config.region) ? bounding_box(parse_curves(config.region), chart)
                                              : region_box(parse_region(config.region), chart);
        if (extra) domain = hull(domain, *extra);
    }
    return parse_form(config.form, domain, chart);
}

Point parse_point(std::string_view text)
{
    const auto v = parse_numbers(text);
    if (v.empty() || v.size() > 3) throw ConfigError("a point has 1 to 3 coordinates");
    Point p{};
    std::copy(v.begin(), v.end(), p.begin());
    return p;
}

// ---- subcommands ----------------------------------------------------------

Json run_entropy(const ExperimentConfig& config)
{
    const Convention conv = parse_convention(config.convention);
    const AnalyticForm form = form_for(config, nullptr);
    if (is_curve_spec(config.region)) {
        const auto curves = parse_curves(config.region);
        return to_json(entropy_direct(form, curves, conv, config.resolution));
    }
    return to_json(entropy_direct(form, parse_region(config.region), conv, config.resolution));
}

Json run_stokes_check(const ExperimentConfig& config)
{
    if (config.candidate.empty()) throw ConfigError("--candidate is required");
    if (config.region.empty()) throw ConfigError("--region is required");
    const Convention conv = parse_convention(config.convention);
    const RegionDescriptor region = parse_region(config.region);
    const auto candidate = parse_curves(config.candidate);
    const Box extra = bounding_box(candidate, form_chart(config.form, default_chart(config)));
    const AnalyticForm form = form_for(config, &extra);
    if (form.degree() != 1 || form.dimension() != 2) throw DegreeError("stokes-check needs a 1-form in the plane");

    const int n = config.resolution;
    const double tol = config.tol.value_or(default_quadrature_tolerance);
    const double target = integrate_region(exterior_derivative(form), region, false, n);
    const auto boundary = region_boundary(region);
    const double boundary_integral = integrate_curves(form, boundary, n);
    const double integral = integrate_curves(form, candidate, n);
    const double residual = std::abs(integral - target);
    const bool member = residual <= tol * (1.0 + std::abs(target));

    auto curve_entropy = [&](const std::vector<Curve>& curves) -> std::optional<double> {
        try {
            return entropy_direct(form, curves, conv, n).entropy;
        } catch (const NormalizationError&) {
            return std::nullopt;
        }
    };
    const auto s_boundary = curve_entropy(boundary);
    const auto s_candidate = curve_entropy(candidate);

    Verdict verdict = Verdict::unchecked;
    if (member && s_boundary) {
        const double s = s_candidate.value_or(-std::numeric_limits<double>::infinity());
        verdict = s > *s_boundary + tie_tolerance
                      ? Verdict::violated
                      : (s >= *s_boundary - tie_tolerance ? Verdict::tie_degenerate : Verdict::extremal);
    }

    auto number = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    Json j;
    j["schema"] = "candidate_report";
    j["version"] = report_version;
    j["mode"] = "continuous";
    j["target"] = target;
    j["tolerance"] = tol;
    j["convention"] = convention_name(conv);
    j["resolution"] = n;
    j["verdict"] = verdict_name(verdict);
    j["boundary_integral"] = boundary_integral;
    j["boundary_residual"] = std::abs(boundary_integral - target);
    j["boundary_entropy"] = number(s_boundary);
    j["candidate"] = {{"spec", config.candidate},
                      {"integral", integral},
                      {"residual", residual},
                      {"member", member},
                      {"entropy", number(s_candidate)}};
    return j;
}

std::pair<Json, std::string> run_search(const ExperimentConfig& config)
{
    if (config.cochain.empty()) throw ConfigError("--cochain is required");
    const auto grid = config.grid.empty() ? std::vector<int>{} : parse_grid(config.grid);
    const Cochain file = read_cochain_file(config.cochain, grid);
    const int n = file.complex().dimension();
    const Cochain omega = file.degree() == n ? top_primitive(file) : file;
    if (omega.degree() != n - 1) throw DegreeError("the cochain file must hold degree n or n-1 values");
    const double tol = config.tol.value_or(default_discrete_tolerance);
    CandidateReport report = config.samples > 0 ? sample_candidates(omega, tol, config.samples, config.seed)
                                                : enumerate_candidates(omega, tol, config.cap);
    score_candidates(report, omega);
    return {to_json(report), to_csv(report)};
}

Json run_example(const ExperimentConfig& config)
{
    if (config.example == "rectangle") {
        const RectangleParams p{config.a, config.b, config.c, config.r};
        return to_json(p, rectangle_oracle(p, config.p));
    }
    if (config.example == "annulus") {
        const AnnulusParams p{config.ri, config.ro};
        return to_json(p, annulus_oracle(p));
    }
    throw ConfigError("example must be rectangle or annulus");
}

ConvergenceProblem custom_density_problem(const ExperimentConfig& config)
{
    if (config.point.empty()) throw ConfigError("--point is required for a custom density study");
    const AnalyticForm form = form_for(config, nullptr);
    const RegionDescriptor region = parse_region(config.region);
    const Box box = region_chart_box(region, form.chart());
    double side = 1e300;
    for (int i = 0; i < box.dimension; ++i) side = std::min(side, box.hi[i] - box.lo[i]);
    const Point x = parse_point(config.point);
    const Convention conv = parse_convention(config.convention);
    const auto schedule = halving_schedule(0.1 * side);
    return {Quantity::density, "density-custom",
            [form, region, x, conv, schedule](int n) { return density_at(form, region, x, conv, schedule, n).value; },
            std::nullopt};
}

std::pair<Json, std::string> run_converge(const ExperimentConfig& config)
{
    const Quantity q = parse_quantity(config.quantity);
    const AnnulusParams annulus{config.ri, config.ro};
    const std::string& name = config.problem;
    ConvergenceProblem problem;
    switch (q) {
    case Quantity::entropy:
        if (name.empty() || name == "annulus-boundary") problem = annulus_boundary_entropy_problem(annulus);
        else if (name == "annulus-circle") problem = annulus_circle_entropy_problem(annulus);
        else if (name == "uniform") {
            const Box box = config.region.empty() ? make_box(std::array{0.0, 0.0}, std::array{1.0, 1.0})
                                                  : region_box(parse_region(config.region), Chart::cartesian);
            problem = uniform_entropy_problem(box, 1.0);
        } else throw ConfigError("entropy problems: annulus-boundary, annulus-circle, uniform");
        break;
    case Quantity::residual:
        if (!name.empty() && name != "circle") throw ConfigError("residual problems: circle");
        problem = circle_residual_problem(annulus, config.power);
        break;
    case Quantity::density:
        if ((name.empty() && config.form.empty()) || name == "square-centre") problem = density_problem(2);
        else if (name.empty() || name == "custom") problem = custom_density_problem(config);
        else throw ConfigError("density problems: square-centre, custom");
        break;
    }
    const auto table = convergence_study(problem, config.schedule);
    return {to_json(table), to_csv(table)};
}

// ---- flags ----------------------------------------------------------------

using Override = std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>;

struct FlagSet {
    ExperimentConfig values;
    std::optional<double> tol;
    std::optional<double> p;
    std::vector<Override> overrides;

    template <class T>
    CLI::Option* add(CLI::App* app, const std::string& name, T ExperimentConfig::*field, const std::string& help)
    {
        auto* opt = app->add_option(name, values.*field, help);
        overrides.emplace_back(opt, [this, field](ExperimentConfig& dst) { dst.*field = values.*field; });
        return opt;
    }

    void add_optional(CLI::App* app, const std::string& name, std::optional<double> FlagSet::*slot,
                      std::optional<double> ExperimentConfig::*field, const std::string& help)
    {
        auto* opt = app->add_option(name, this->*slot, help);
        overrides.emplace_back(opt, [this, slot, field](ExperimentConfig& dst) { dst.*field = this->*slot; });
    }
};

void apply_worker_env()
{
    if (const char* env = std::getenv(workers_env); env != nullptr && *env != '\0') {
        int workers = 0;
        const std::string_view text(env);
        const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), workers);
        if (ec != std::errc{} || end != text.data() + text.size() || workers <= 0)
            throw ConfigError(std::string(workers_env) + " must be a positive integer");
        kernels::set_worker_count(workers);
    }
}

} // namespace

// ---- parsers --------------------------------------------------------------

RegionDescriptor parse_region(std::string_view spec)
{
    const auto [kind, rest] = head(trim(spec));
    if (kind == "box") return box_from_numbers(parse_numbers(rest));
    if (kind == "annulus") {
        const auto v = parse_numbers(rest);
        if (v.size() != 2) throw ConfigError("annulus takes annulus:ri,ro");
        return make_annulus(v[0], v[1]);
    }
    throw ConfigError("unknown region '" + std::string(spec) + "' (expected box:... or annulus:ri,ro)");
}

bool is_curve_spec(std::string_view spec)
{
    spec = trim(spec);
    return starts_with(spec, "circle:") || starts_with(spec, "box-boundary:") || starts_with(spec, "annulus-boundary:");
}

std::vector<Curve> parse_curves(std::string_view spec)
{
    std::vector<Curve> out;
    for (auto part : split(spec, '+')) {
        const auto [kind, rest] = head(trim(part));
        auto args = split(rest, ',');
        bool ccw = true;
        if (!args.empty() && (trim(args.back()) == "cw" || trim(args.back()) == "ccw")) {
            ccw = trim(args.back()) == "ccw";
            args.pop_back();
        }
        std::vector<double> v;
        for (auto a : args) v.push_back(parse_number(a));
        if (kind == "circle") {
            if (v.size() != 1 && v.size() != 3) throw ConfigError("circle takes circle:r[,cw] or circle:r,cx,cy[,cw]");
            if (!(v[0] > 0.0)) throw InvalidGeometryError("circle radius must be positive");
            Circle c{{0.0, 0.0}, v[0], ccw};
            if (v.size() == 3) c.center = {v[1], v[2]};
            out.emplace_back(c);
        } else if (kind == "box-boundary") {
            if (v.size() != 4) throw ConfigError("box-boundary takes x0,y0,x1,y1[,cw]");
            out.emplace_back(BoxPerimeter{box_from_numbers(v), ccw});
        } else if (kind == "annulus-boundary") {
            if (v.size() != 2) throw ConfigError("annulus-boundary takes ri,ro");
            for (auto& c : annulus_boundary(make_annulus(v[0], v[1]))) out.push_back(c);
        } else {
            throw ConfigError("unknown curve '" + std::string(part) + "'");
        }
    }
    return out;
}

AnalyticForm parse_form(std::string_view spec, const Box& domain, Chart chart)
{
    const auto [kind, rest] = head(trim(spec));
    if (kind == "const") return AnalyticForm::constant(domain, parse_number(rest), chart);
    if (kind == "expr") {
        const auto colon1 = rest.find(':');
        const auto colon2 = colon1 == std::string_view::npos ? colon1 : rest.find(':', colon1 + 1);
        if (colon2 == std::string_view::npos) throw ConfigError("expr forms read expr:<degree>:<chart>:<coefficients>");
        const double degree = parse_number(rest.substr(0, colon1));
        if (degree != std::floor(degree) || degree < 0 || degree > 3) throw DegreeError("form degree must be 0..3");
        const Chart named = parse_chart(trim(rest.substr(colon1 + 1, colon2 - colon1 - 1)));
        std::vector<Expression> coeffs;
        for (auto c : split(rest.substr(colon2 + 1), ';')) coeffs.push_back(parse_expression(c));
        return AnalyticForm(static_cast<int>(degree), named, std::move(coeffs), domain);
    }
    if (kind == "piecewise") {
        if (!starts_with(rest, "@")) throw ConfigError("piecewise forms read piecewise:@file");
        const Json j = read_json_file(std::string(rest.substr(1)));
        try {
            const Chart named = j.contains("chart") ? parse_chart(j.at("chart").get<std::string>()) : chart;
            const Box dom = j.contains("domain") ? box_from_numbers(json_numbers(j.at("domain"), "domain")) : domain;
            const int degree = j.contains("degree") ? j.at("degree").get<int>() : dom.dimension;
            std::vector<Piece> pieces;
            for (const auto& piece : j.at("pieces"))
                pieces.push_back({box_from_numbers(json_numbers(piece.at("box"), "box")),
                                  json_coefficients(piece.at("coefficients"))});
            return AnalyticForm(degree, named, {}, dom, std::move(pieces));
        } catch (const Json::exception& e) {
            throw ConfigError(std::string("malformed piecewise form: ") + e.what());
        }
    }
    throw ConfigError("unknown form '" + std::string(spec) + "' (expected const:, expr: or piecewise:)");
}

std::vector<int> parse_grid(std::string_view spec)
{
    std::vector<int> out;
    for (auto part : split(trim(spec), 'x')) {
        const double v = parse_number(part);
        if (v != std::floor(v) || v < 1 || v > 1e6) throw ConfigError("grid extents must be positive integers");
        out.push_back(static_cast<int>(v));
    }
    if (out.empty() || out.size() > 3) throw ConfigError("grid reads WxH (1 to 3 extents)");
    return out;
}

Cochain read_cochain_file(const std::string& path, std::span<const int> grid)
{
    const Json j = read_json_file(path);
    try {
        std::vector<int> shape = j.contains("shape") ? j.at("shape").get<std::vector<int>>()
                                                     : std::vector<int>(grid.begin(), grid.end());
        if (shape.empty()) throw ConfigError("cochain file has no shape and no --grid was given");
        if (!grid.empty() && !std::equal(shape.begin(), shape.end(), grid.begin(), grid.end()))
            throw MismatchError("cochain shape does not match --grid");
        const int n = static_cast<int>(shape.size());
        Box box;
        if (j.contains("box")) {
            box = box_from_numbers(json_numbers(j.at("box"), "box"));
        } else {
            std::vector<double> lo(shape.size(), 0.0);
            std::vector<double> hi(shape.begin(), shape.end());
            box = make_box(lo, hi);
        }
        const GridComplex complex(box, shape);
        const int degree = j.contains("degree") ? j.at("degree").get<int>() : n;
        return Cochain(complex, degree, json_numbers(j.at("values"), "values"));
    } catch (const Json::exception& e) {
        throw ConfigError("malformed cochain file '" + path + "': " + e.what());
    }
}

// ---- config ---------------------------------------------------------------

Json config_to_json(const ExperimentConfig& c)
{
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    Json j;
    j["command"] = c.command;
    j["example"] = c.example;
    j["form"] = c.form;
    j["region"] = c.region;
    j["candidate"] = c.candidate;
    j["domain"] = c.domain;
    j["convention"] = c.convention;
    j["resolution"] = c.resolution;
    j["grid"] = c.grid;
    j["cochain"] = c.cochain;
    j["tol"] = opt(c.tol);
    j["cap"] = c.cap;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["quantity"] = c.quantity;
    j["problem"] = c.problem;
    j["schedule"] = c.schedule;
    j["point"] = c.point;
    j["power"] = c.power;
    j["a"] = c.a;
    j["b"] = c.b;
    j["c"] = c.c;
    j["r"] = c.r;
    j["p"] = opt(c.p);
    j["ri"] = c.ri;
    j["ro"] = c.ro;
    j["out"] = c.out;
    j["csv"] = c.csv;
    return j;
}

ExperimentConfig config_from_json(const Json& j)
{
    if (!j.is_object()) throw ConfigError("a config file holds one JSON object");
    ExperimentConfig c;
    const std::map<std::string, std::function<void(const Json&)>> fields{
        {"command", [&](const Json& v) { c.command = v.get<std::string>(); }},
        {"example", [&](const Json& v) { c.example = v.get<std::string>(); }},
        {"form", [&](const Json& v) { c.form = v.get<std::string>(); }},
        {"region", [&](const Json& v) { c.region = v.get<std::string>(); }},
        {"candidate", [&](const Json& v) { c.candidate = v.get<std::string>(); }},
        {"domain", [&](const Json& v) { c.domain = v.get<std::string>(); }},
        {"convention", [&](const Json& v) { c.convention = v.get<std::string>(); }},
        {"resolution", [&](const Json& v) { c.resolution = v.get<int>(); }},
        {"grid", [&](const Json& v) { c.grid = v.get<std::string>(); }},
        {"cochain", [&](const Json& v) { c.cochain = v.get<std::string>(); }},
        {"tol", [&](const Json& v) { c.tol = v.is_null() ? std::nullopt : std::optional(v.get<double>()); }},
        {"cap", [&](const Json& v) { c.cap = v.get<std::size_t>(); }},
        {"samples", [&](const Json& v) { c.samples = v.get<std::size_t>(); }},
        {"seed", [&](const Json& v) { c.seed = v.get<std::uint64_t>(); }},
        {"quantity", [&](const Json& v) { c.quantity = v.get<std::string>(); }},
        {"problem", [&](const Json& v) { c.problem = v.get<std::string>(); }},
        {"schedule", [&](const Json& v) { c.schedule = v.get<std::vector<int>>(); }},
        {"point", [&](const Json& v) { c.point = v.get<std::string>(); }},
        {"power", [&](const Json& v) { c.power = v.get<double>(); }},
        {"a", [&](const Json& v) { c.a = v.get<double>(); }},
        {"b", [&](const Json& v) { c.b = v.get<double>(); }},
        {"c", [&](const Json& v) { c.c = v.get<double>(); }},
        {"r", [&](const Json& v) { c.r = v.get<double>(); }},
        {"p", [&](const Json& v) { c.p = v.is_null() ? std::nullopt : std::optional(v.get<double>()); }},
        {"ri", [&](const Json& v) { c.ri = v.get<double>(); }},
        {"ro", [&](const Json& v) { c.ro = v.get<double>(); }},
        {"out", [&](const Json& v) { c.out = v.get<std::string>(); }},
        {"csv", [&](const Json& v) { c.csv = v.get<std::string>(); }},
    };
    for (const auto& [key, value] : j.items()) {
        const auto it = fields.find(key);
        if (it == fields.end()) throw ConfigError("unknown config key '" + key + "'");
        try {
            it->second(value);
        } catch (const Json::exception&) {
            throw ConfigError("config key '" + key + "' has the wrong type");
        }
    }
    return c;
}

void validate_config(const ExperimentConfig& c)
{
    static const std::set<std::string> commands{"entropy", "stokes-check", "search", "example", "converge"};
    if (!commands.contains(c.command)) throw ConfigError("unknown command '" + c.command + "'");
    parse_convention(c.convention);
    parse_quantity(c.quantity);
    if (c.resolution <= 0) throw ConfigError("resolution must be positive");
    for (int n : c.schedule)
        if (n <= 0) throw ConfigError("schedule resolutions must be positive");
    if (c.tol && !(*c.tol >= 0.0)) throw ConfigError("tolerance must be nonnegative");
    if (c.cap == 0) throw ConfigError("enumeration cap must be positive");
    if (c.command == "example" && c.example != "rectangle" && c.example != "annulus")
        throw ConfigError("example must be rectangle or annulus");
    if (c.command == "search" && c.cochain.empty()) throw ConfigError("search needs --cochain");
    if (!c.cochain.empty() && !std::filesystem::exists(c.cochain))
        throw ConfigError("cochain file '" + c.cochain + "' does not exist");
    if (starts_with(c.form, "piecewise:@") && !std::filesystem::exists(c.form.substr(11)))
        throw ConfigError("form file '" + c.form.substr(11) + "' does not exist");
}

// ---- driver ---------------------------------------------------------------

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Entropy of differential forms and the Stokes candidate set", "stokes-entropy"};
    app.require_subcommand(1);
    FlagSet flags;
    std::string config_path;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file; flags override its values");
        flags.add(sub, "--out", &ExperimentConfig::out, "write the JSON report here instead of stdout");
    };
    auto form_flags = [&](CLI::App* sub) {
        flags.add(sub, "--form", &ExperimentConfig::form, "const:v | expr:<degree>:<chart>:<c1;c2;...> | piecewise:@file");
        flags.add(sub, "--region", &ExperimentConfig::region, "box:x0,y0,x1,y1 | annulus:ri,ro | circle:r[,cw]");
        flags.add(sub, "--domain", &ExperimentConfig::domain, "box:... overriding the form's domain");
        flags.add(sub, "--convention", &ExperimentConfig::convention, "intrinsic | coordinate");
    };

    auto* entropy = app.add_subcommand("entropy", "entropy of a form over a region or curves");
    common(entropy);
    form_flags(entropy);
    flags.add(entropy, "--resolution", &ExperimentConfig::resolution, "quadrature cells per axis");

    auto* check = app.add_subcommand("stokes-check", "test a curve candidate against the Stokes relation");
    common(check);
    form_flags(check);
    flags.add(check, "--candidate", &ExperimentConfig::candidate, "circle:r[,cw] | box-boundary:... | annulus-boundary:ri,ro");
    flags.add(check, "--resolution", &ExperimentConfig::resolution, "quadrature samples");
    flags.add_optional(check, "--tol", &FlagSet::tol, &ExperimentConfig::tol, "relative membership tolerance");

    auto* search = app.add_subcommand("search", "enumerate bounding candidates of a cochain");
    common(search);
    flags.add(search, "--grid", &ExperimentConfig::grid, "WxH");
    flags.add(search, "--cochain", &ExperimentConfig::cochain, "cochain JSON file");
    flags.add_optional(search, "--tol", &FlagSet::tol, &ExperimentConfig::tol, "relative membership tolerance");
    flags.add(search, "--cap", &ExperimentConfig::cap, "largest top-cell count for exhaustive enumeration");
    flags.add(search, "--samples", &ExperimentConfig::samples, "random subsets to test instead of enumerating");
    flags.add(search, "--seed", &ExperimentConfig::seed, "seed for --samples");
    flags.add(search, "--csv", &ExperimentConfig::csv, "also write (mask, residual, entropy) rows here");

    auto* example = app.add_subcommand("example", "closed-form worked examples");
    example->require_subcommand(1);
    auto* rectangle = example->add_subcommand("rectangle", "three-piece form on a rectangle");
    common(rectangle);
    flags.add(rectangle, "--a", &ExperimentConfig::a, "half-width of Y");
    flags.add(rectangle, "--b", &ExperimentConfig::b, "half-height");
    flags.add(rectangle, "--c", &ExperimentConfig::c, "value on Y");
    flags.add(rectangle, "--r", &ExperimentConfig::r, "ratio for the outer pieces");
    flags.add_optional(rectangle, "--p", &FlagSet::p, &ExperimentConfig::p, "generalized mean order (>= 1)");
    auto* annulus = example->add_subcommand("annulus", "r dtheta on an annulus");
    common(annulus);
    flags.add(annulus, "--ri", &ExperimentConfig::ri, "inner radius");
    flags.add(annulus, "--ro", &ExperimentConfig::ro, "outer radius");

    auto* converge = app.add_subcommand("converge", "resolution study against a closed form");
    common(converge);
    form_flags(converge);
    flags.add(converge, "--quantity", &ExperimentConfig::quantity, "entropy | residual | density");
    flags.add(converge, "--problem", &ExperimentConfig::problem,
              "annulus-boundary | annulus-circle | uniform | circle | square-centre | custom");
    flags.add(converge, "--schedule", &ExperimentConfig::schedule, "N1,N2,... strictly increasing")
        ->delimiter(',');
    flags.add(converge, "--ri", &ExperimentConfig::ri, "inner radius");
    flags.add(converge, "--ro", &ExperimentConfig::ro, "outer radius");
    flags.add(converge, "--power", &ExperimentConfig::power, "residual study form r^power dtheta");
    flags.add(converge, "--point", &ExperimentConfig::point, "density point x,y");
    flags.add(converge, "--csv", &ExperimentConfig::csv, "also write the table as CSV here");

    std::vector<const char*> argv{"stokes-entropy"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        apply_worker_env();
        ExperimentConfig config;
        if (!config_path.empty()) config = config_from_json(read_json_file(config_path));
        for (const auto& [opt, apply] : flags.overrides)
            if (opt->count() > 0) apply(config);

        std::string command;
        for (auto* sub : app.get_subcommands()) command = sub->get_name();
        if (command == "example") {
            config.example = example->get_subcommands().front()->get_name();
        }
        if (!config.command.empty() && config.command != command)
            throw ConfigError("config file is for '" + config.command + "', not '" + command + "'");
        config.command = command;
        validate_config(config);

        Json report;
        std::string csv;
        if (command == "entropy") report = run_entropy(config);
        else if (command == "stokes-check") report = run_stokes_check(config);
        else if (command == "search") std::tie(report, csv) = run_search(config);
        else if (command == "example") report = run_example(config);
        else std::tie(report, csv) = run_converge(config);

        if (!config.csv.empty()) {
            if (csv.empty()) throw ConfigError("--csv is available for search and converge");
            emit_report(csv, config.csv, out);
        }
        emit_report(dump_json(report) + "\n", config.out, out);
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.numerical() ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(int argc, const char* const* argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace stokes
