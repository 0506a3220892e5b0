#pragma once

// JSON/CSV emission for every result type. Doubles are written with 17
// significant digits so a report parses back to the same bits.

#include "stokes/duality.hpp"
#include "stokes/entropy.hpp"
#include "stokes/oracles.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <string_view>

namespace stokes {

inline constexpr int report_version = 1;

using Json = nlohmann::ordered_json;

/// %.17g for finite values, null otherwise.
std::string format_number(double value);
/// Compact single-line serialization using format_number for floats.
std::string dump_json(const Json& value);

Json to_json(const EntropyReport& report);
Json to_json(const CandidateReport& report);
Json to_json(const ConvergenceTable& table);
Json to_json(const RectangleParams& p, const RectangleResult& result);
Json to_json(const AnnulusParams& p, const AnnulusResult& result);

/// [{"cell": [k, [i0, i1, ...], [axes...]], "coeff": c}, ...] in id order.
Json chain_to_json(const Chain& chain);
Chain chain_from_json(const Json& json, const GridComplex& complex);

/// (mask, residual, entropy) rows.
std::string to_csv(const CandidateReport& report);
/// (resolution, value, abs_error, observed_order) rows.
std::string to_csv(const ConvergenceTable& table);

/// Writes `text` to `path`, or to `out` when path is empty or "-".
void emit_report(std::string_view text, const std::string& path, std::ostream& out);

} // namespace stokes
