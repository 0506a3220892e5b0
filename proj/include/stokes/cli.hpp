#pragma once

// Command-line front end. Every subcommand prints one JSON line on stdout
// (or writes it to --out); exit codes are 0 ok, 1 validation error,
// 2 numerical non-convergence.

#include "stokes/complex.hpp"
#include "stokes/forms.hpp"
#include "stokes/report.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stokes {

/// Worker count override read by run_cli; unset means all cores.
inline constexpr const char* workers_env = "STOKES_WORKERS";

struct ExperimentConfig {
    std::string command;  // entropy | stokes-check | search | example | converge
    std::string example;  // rectangle | annulus (example only)
    std::string form;     // const:v | expr:<degree>:<chart>:<c1;c2;...> | piecewise:@file
    std::string region;   // box:x0,y0,x1,y1 | annulus:ri,ro | circle:r[,cw] | annulus-boundary:ri,ro
    std::string candidate;
    std::string domain;   // optional box:... overriding the form's domain
    std::string convention = "intrinsic";
    int resolution = 256;
    std::string grid;     // WxH or WxHxD
    std::string cochain;  // path to a cochain JSON file
    std::optional<double> tol;
    std::size_t cap = 24;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::string quantity = "entropy";
    std::string problem;
    std::vector<int> schedule;
    std::string point;
    double power = 1.0;
    double a = 1.0, b = 1.0, c = 1.0, r = 1.0;
    std::optional<double> p;
    double ri = 1.0, ro = 2.0;
    std::string out;
    std::string csv;

    bool operator==(const ExperimentConfig&) const = default;
};

Json config_to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const Json& json);
/// Enum values, positivity of resolutions, referenced files.
void validate_config(const ExperimentConfig& config);

// Mini-syntax parsers.
RegionDescriptor parse_region(std::string_view spec);
/// circle:r[,cw], box-boundary:x0,y0,x1,y1, annulus-boundary:ri,ro; several
/// curves may be joined with '+'.
std::vector<Curve> parse_curves(std::string_view spec);
bool is_curve_spec(std::string_view spec);
/// `domain` and `chart` fill in what the spec leaves open; const:v is
/// top-degree on `domain`.
AnalyticForm parse_form(std::string_view spec, const Box& domain, Chart chart);
/// {"degree", "shape", "values", optional "box"}; `shape` must match `grid`
/// when both are given. Unit cells starting at the origin by default.
Cochain read_cochain_file(const std::string& path, std::span<const int> grid);
std::vector<int> parse_grid(std::string_view spec);

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

} // namespace stokes
