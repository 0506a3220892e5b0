#include "stokes/duality.hpp"

#include "stokes/errors.hpp"
#include "stokes/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

namespace stokes {

double stokes_residual(const Cochain& omega, const Chain& candidate, const Chain& region)
{
    const int n = omega.complex().dimension();
    if (omega.degree() != n - 1 || candidate.degree() != n - 1 || region.degree() != n)
        throw DegreeError("Stokes residual needs an (n-1)-cochain, an (n-1)-chain and an n-chain");
    return std::abs(pairing(omega, candidate) - pairing(coboundary(omega), region));
}

double stokes_residual(const AnalyticForm& omega, std::span<const Curve> candidate, const RegionDescriptor& region,
                       int resolution)
{
    if (omega.dimension() != 2 || omega.degree() != 1)
        throw DegreeError("curve candidates need a 1-form in the plane");
    const auto d_omega = exterior_derivative(omega);
    return std::abs(integrate_curves(omega, candidate, resolution) - integrate_region(d_omega, region, false, resolution));
}

std::string_view verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::extremal: return "extremal";
    case Verdict::tie_degenerate: return "tie-degenerate";
    case Verdict::violated: return "violated";
    case Verdict::unchecked: return "unchecked";
    }
    return "?";
}

namespace {

void check_omega(const Cochain& omega)
{
    const int n = omega.complex().dimension();
    if (omega.degree() != n - 1) throw DegreeError("candidates are scored against an (n-1)-cochain");
}

std::vector<std::size_t> mask_cells(std::uint32_t mask)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < 32; ++i)
        if ((mask >> i) & 1U) out.push_back(i);
    return out;
}

Candidate make_candidate(const Cochain& omega, std::uint32_t mask, double target)
{
    const auto& complex = omega.complex();
    const auto cells = mask_cells(mask);
    const Chain region = cell_chain(complex, cells);
    Candidate c{mask, {}, boundary(region), 0.0, std::nullopt};
    c.interior = interior_region(c.boundary).cells;
    if (c.interior != cells) throw std::logic_error("interior of boundary(R) differs from R");
    c.residual = std::abs(pairing(omega, c.boundary) - target);
    return c;
}

CandidateReport report_for(const Cochain& omega, std::vector<std::uint32_t> masks, double tol, double target)
{
    const std::size_t cells = omega.complex().cell_count(omega.complex().dimension());
    CandidateReport report;
    report.target = target;
    report.tolerance = tol;
    report.full_mask = cells >= 32 ? 0xFFFFFFFFU : static_cast<std::uint32_t>((std::uint64_t{1} << cells) - 1U);
    if (std::find(masks.begin(), masks.end(), report.full_mask) == masks.end()) masks.push_back(report.full_mask);
    std::sort(masks.begin(), masks.end());
    masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
    for (auto m : masks) report.candidates.push_back(make_candidate(omega, m, target));
    return report;
}

} // namespace

CandidateReport enumerate_candidates(const Cochain& omega, double tol, std::size_t cap)
{
    check_omega(omega);
    if (!(tol >= 0.0)) throw ConfigError("tolerance must be nonnegative");
    const auto& complex = omega.complex();
    const std::size_t cells = complex.cell_count(complex.dimension());
    if (cells > cap || cells > 31)
        throw TooLargeError(std::to_string(cells) + " top cells exceed the enumeration cap of " + std::to_string(cap)
                            + "; use sampling mode (--samples, --seed)");
    const Cochain d_omega = coboundary(omega);
    const double target = pairing(d_omega, full_chain(complex));
    const double band = tol * (1.0 + std::abs(target));
    auto masks = kernels::matching_subsets(d_omega.values(), target, band);
    return report_for(omega, std::move(masks), tol, target);
}

std::vector<std::uint32_t> enumerate_masks_by_pairing(const Cochain& omega, double tol)
{
    check_omega(omega);
    const auto& complex = omega.complex();
    const std::size_t cells = complex.cell_count(complex.dimension());
    if (cells > 20) throw TooLargeError("reference enumeration is limited to 20 top cells");
    const double target = pairing(coboundary(omega), full_chain(complex));
    const double band = tol * (1.0 + std::abs(target));
    std::vector<std::uint32_t> out;
    for (std::uint32_t m = 1; m < (1U << cells); ++m) {
        const auto ids = mask_cells(m);
        if (std::abs(pairing(omega, boundary(cell_chain(complex, ids))) - target) <= band) out.push_back(m);
    }
    return out;
}

CandidateReport sample_candidates(const Cochain& omega, double tol, std::size_t samples, std::uint64_t seed)
{
    check_omega(omega);
    const auto& complex = omega.complex();
    const std::size_t cells = complex.cell_count(complex.dimension());
    if (cells > 31) throw TooLargeError("sampling mode supports at most 31 top cells");
    const Cochain d_omega = coboundary(omega);
    const double target = pairing(d_omega, full_chain(complex));
    const double band = tol * (1.0 + std::abs(target));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint32_t> pick(1U, static_cast<std::uint32_t>((std::uint64_t{1} << cells) - 1U));
    std::set<std::uint32_t> hits;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto m = pick(rng);
        double sum = 0.0;
        for (std::size_t i = 0; i < cells; ++i)
            if ((m >> i) & 1U) sum += d_omega.value(i);
        if (std::abs(sum - target) <= band) hits.insert(m);
    }
    auto report = report_for(omega, {hits.begin(), hits.end()}, tol, target);
    report.sampled = true;
    report.seed = seed;
    return report;
}

void score_candidates(CandidateReport& report, const Cochain& omega)
{
    check_omega(omega);
    const auto& complex = omega.complex();
    const int n = complex.dimension();
    const Cochain d_omega = coboundary(omega);

    auto score = [&](const std::vector<std::size_t>& cells) -> std::optional<double> {
        std::vector<double> density;
        std::vector<double> measure;
        double mass = 0.0;
        for (auto id : cells) {
            const double v = complex.intrinsic_volume(complex.cell(n, id));
            density.push_back(std::abs(d_omega.value(id)) / v);
            measure.push_back(v);
            mass += std::abs(d_omega.value(id));
        }
        if (mass == 0.0) return std::nullopt;
        return entropy_geometric_mean(density, measure);
    };

    double scale = 0.0;
    for (double v : d_omega.values()) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) throw NormalizationError("d(omega) vanishes on every cell");

    for (auto& c : report.candidates) c.entropy = score(c.interior);
    const auto full = std::find_if(report.candidates.begin(), report.candidates.end(),
                                   [&](const Candidate& c) { return c.mask == report.full_mask; });
    report.boundary_entropy = full->entropy;
    const double s_full = *full->entropy;

    report.argmax_mask = report.full_mask;
    double best = s_full;
    bool tie = false;
    bool violated = false;
    for (const auto& c : report.candidates) {
        if (c.mask == report.full_mask || !c.entropy) continue;
        const double s = *c.entropy;
        if (s > best + tie_tolerance) {
            best = s;
            report.argmax_mask = c.mask;
        }
        if (s > s_full + tie_tolerance) {
            violated = true;
        } else if (s >= s_full - tie_tolerance) {
            // A tie is degenerate only when dw vanishes on the cells separating
            // int(B) from int(boundary M).
            bool vanishes = true;
            for (std::size_t id = 0; id < d_omega.values().size(); ++id)
                if (!((c.mask >> id) & 1U) && std::abs(d_omega.value(id)) > 1e-12 * scale) vanishes = false;
            if (vanishes) tie = true;
            else violated = true;
        }
    }
    report.verdict = violated ? Verdict::violated : (tie ? Verdict::tie_degenerate : Verdict::extremal);
}

CandidateReport verify_extremality(const Cochain& omega, double tol, std::size_t cap)
{
    auto report = enumerate_candidates(omega, tol, cap);
    score_candidates(report, omega);
    return report;
}

std::string_view quantity_name(Quantity q)
{
    switch (q) {
    case Quantity::entropy: return "entropy";
    case Quantity::residual: return "residual";
    case Quantity::density: return "density";
    }
    return "?";
}

Quantity parse_quantity(std::string_view text)
{
    if (text == "entropy") return Quantity::entropy;
    if (text == "residual") return Quantity::residual;
    if (text == "density") return Quantity::density;
    throw ConfigError("unknown quantity '" + std::string(text) + "' (expected entropy, residual or density)");
}

ConvergenceTable convergence_study(const ConvergenceProblem& problem, std::span<const int> schedule)
{
    if (schedule.size() < 3) throw ConfigError("a convergence study needs at least three resolutions");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i] <= 0) throw ConfigError("resolutions must be positive");
        if (i > 0 && schedule[i] <= schedule[i - 1]) throw ConfigError("resolutions must increase strictly");
    }
    ConvergenceTable table;
    table.problem = problem.name;
    table.quantity = problem.quantity;
    table.reference = problem.reference;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        ConvergenceRow row;
        row.resolution = schedule[i];
        row.value = problem.evaluate(schedule[i]);
        if (problem.reference) row.abs_error = std::abs(row.value - *problem.reference);
        if (i > 0 && row.abs_error && table.rows.back().abs_error) {
            const double prev = *table.rows.back().abs_error;
            const double cur = *row.abs_error;
            if (prev > 0.0 && cur > 0.0)
                row.observed_order = std::log(prev / cur) / std::log(static_cast<double>(schedule[i]) / schedule[i - 1]);
        }
        table.rows.push_back(row);
    }
    return table;
}

namespace {

// Polar complex over radii [lo, hi] (one radial cell) and `resolution`
// angular cells, with r dtheta discretized on it.
Cochain annulus_cochain(double lo, double hi, int resolution)
{
    const Box box = chart_box(make_annulus(lo, hi));
    const std::array shape{1, resolution};
    const GridComplex complex(box, shape, Chart::polar);
    const AnalyticForm omega(1, Chart::polar, {Expression::constant(0.0), Expression::variable(Variable::r)}, box);
    return discretize(omega, complex, 1);
}

} // namespace

double annulus_boundary_entropy_discrete(const AnnulusParams& p, int resolution)
{
    const Cochain omega = annulus_cochain(p.inner, p.outer, resolution);
    const Chain b = boundary(full_chain(omega.complex()));
    return entropy_direct(omega, b, Convention::coordinate).entropy;
}

double annulus_circle_entropy_discrete(const AnnulusParams& p, int resolution)
{
    const auto oracle = annulus_oracle(p);
    const Cochain omega = annulus_cochain(oracle.r_b, std::max(p.outer, oracle.r_b * 2.0), resolution);
    const auto& complex = omega.complex();
    Chain circle(complex, 1);
    for (int j = 0; j < resolution; ++j) circle.add(Cell{1, {0, j, 0}, 0b10}, 1);
    return entropy_direct(omega, circle, Convention::coordinate).entropy;
}

ConvergenceProblem annulus_boundary_entropy_problem(const AnnulusParams& p)
{
    return {Quantity::entropy, "annulus-boundary-entropy",
            [p](int n) { return annulus_boundary_entropy_discrete(p, n); }, annulus_oracle(p).s_boundary};
}

ConvergenceProblem annulus_circle_entropy_problem(const AnnulusParams& p)
{
    return {Quantity::entropy, "annulus-circle-entropy",
            [p](int n) { return annulus_circle_entropy_discrete(p, n); }, annulus_oracle(p).s_circle};
}

ConvergenceProblem uniform_entropy_problem(const Box& box, double value)
{
    return {Quantity::entropy, "uniform-entropy",
            [box, value](int n) {
                return entropy_direct(AnalyticForm::constant(box, value), RegionDescriptor{box}, Convention::intrinsic, n)
                    .entropy;
            },
            std::log(box.volume())};
}

ConvergenceProblem circle_residual_problem(const AnnulusParams& p, double power)
{
    if (!(power > 0.0)) throw ConfigError("form power must be positive");
    const double radius = std::pow(std::pow(p.outer, power) - std::pow(p.inner, power), 1.0 / power);
    const Annulus region = make_annulus(p.inner, p.outer);
    const Box domain = chart_box(make_annulus(std::min(p.inner, radius), std::max(p.outer, radius)));
    const AnalyticForm omega(1, Chart::polar,
                             {Expression::constant(0.0), pow(Expression::variable(Variable::r), power)}, domain);
    return {Quantity::residual, "circle-residual",
            [omega, region, radius](int n) {
                const std::vector<Curve> circle{Circle{{0.0, 0.0}, radius, true}};
                return stokes_residual(omega, circle, RegionDescriptor{region}, n);
            },
            0.0};
}

ConvergenceProblem density_problem(int dimension)
{
    if (dimension != 2) throw UnsupportedError("the density study runs on the unit square");
    const std::array lo{0.0, 0.0};
    const std::array hi{1.0, 1.0};
    const Box box = make_box(lo, hi);
    const auto x = Expression::variable(Variable::x);
    const AnalyticForm alpha(2, Chart::cartesian, {Expression::constant(1.0) + x * x}, box);
    return {Quantity::density, "density-square-centre",
            [alpha, box](int n) {
                const auto schedule = halving_schedule(0.2);
                return density_at(alpha, RegionDescriptor{box}, Point{0.5, 0.5, 0.0}, Convention::intrinsic, schedule, n)
                    .value;
            },
            1.25 / (4.0 / 3.0)};
}

} // namespace stokes
