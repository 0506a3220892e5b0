#include "stokes/report.hpp"

#include "stokes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace stokes {

std::string format_number(double value)
{
    if (!std::isfinite(value)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

void write(const Json& v, std::string& out)
{
    switch (v.type()) {
    case Json::value_t::object: {
        out += '{';
        bool first = true;
        for (const auto& [key, item] : v.items()) {
            if (!first) out += ',';
            first = false;
            out += Json(key).dump();
            out += ':';
            write(item, out);
        }
        out += '}';
        break;
    }
    case Json::value_t::array: {
        out += '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ',';
            write(v[i], out);
        }
        out += ']';
        break;
    }
    case Json::value_t::number_float: out += format_number(v.get<double>()); break;
    default: out += v.dump(); break;
    }
}

Json optional_number(const std::optional<double>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

Json envelope(std::string_view schema)
{
    Json j;
    j["schema"] = schema;
    j["version"] = report_version;
    return j;
}

std::string csv_number(const std::optional<double>& v)
{
    return v ? format_number(*v) : std::string();
}

} // namespace

std::string dump_json(const Json& value)
{
    std::string out;
    write(value, out);
    return out;
}

Json to_json(const EntropyReport& report)
{
    Json j = envelope("entropy_report");
    j["S"] = report.entropy;
    j["Z"] = report.normalizer;
    j["convention"] = convention_name(report.convention);
    j["resolution"] = report.resolution;
    j["method"] = method_name(report.method);
    j["sum_rho_measure"] = report.sum_rho_measure;
    j["schedule_residual"] = report.schedule_residual;
    return j;
}

Json to_json(const CandidateReport& report)
{
    Json j = envelope("candidate_report");
    j["mode"] = "discrete";
    j["target"] = report.target;
    j["tolerance"] = report.tolerance;
    j["verdict"] = verdict_name(report.verdict);
    j["boundary_entropy"] = optional_number(report.boundary_entropy);
    j["full_mask"] = report.full_mask;
    j["argmax_mask"] = report.argmax_mask;
    j["sampled"] = report.sampled;
    if (report.sampled) j["seed"] = report.seed;
    j["candidate_count"] = report.candidates.size();
    Json list = Json::array();
    for (const auto& c : report.candidates) {
        Json item;
        item["mask"] = c.mask;
        item["interior"] = c.interior;
        item["residual"] = c.residual;
        item["entropy"] = optional_number(c.entropy);
        list.push_back(std::move(item));
    }
    j["candidates"] = std::move(list);
    return j;
}

Json to_json(const ConvergenceTable& table)
{
    Json j = envelope("convergence_table");
    j["problem"] = table.problem;
    j["quantity"] = quantity_name(table.quantity);
    j["reference"] = optional_number(table.reference);
    Json rows = Json::array();
    for (const auto& r : table.rows) {
        Json row;
        row["resolution"] = r.resolution;
        row["value"] = r.value;
        row["abs_error"] = optional_number(r.abs_error);
        row["observed_order"] = optional_number(r.observed_order);
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

Json to_json(const RectangleParams& p, const RectangleResult& result)
{
    Json j = envelope("oracle_result");
    j["example"] = "rectangle";
    j["params"] = {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"r", p.r}};
    j["Z_Y"] = result.z_y;
    j["Z_X"] = result.z_x;
    j["S_Y"] = result.s_y;
    j["S_X"] = result.s_x;
    j["delta_S"] = result.delta_s;
    j["mean_Y"] = result.mean_y;
    j["mean_X"] = result.mean_x;
    if (result.order) {
        j["p"] = *result.order;
        j["mean_Y_p"] = optional_number(result.mean_y_order);
        j["mean_X_p"] = optional_number(result.mean_x_order);
    }
    return j;
}

Json to_json(const AnnulusParams& p, const AnnulusResult& result)
{
    Json j = envelope("oracle_result");
    j["example"] = "annulus";
    j["params"] = {{"ri", p.inner}, {"ro", p.outer}};
    j["flux"] = result.flux;
    j["r_B"] = result.r_b;
    j["S_boundary"] = result.s_boundary;
    j["S_circle"] = result.s_circle;
    j["delta_S"] = result.delta_s;
    j["delta_S_printed"] = result.delta_s_printed;
    return j;
}

Json chain_to_json(const Chain& chain)
{
    const auto& complex = chain.complex();
    const int n = complex.dimension();
    Json list = Json::array();
    for (const auto& [id, coeff] : chain.terms()) {
        const Cell cell = complex.cell(chain.degree(), id);
        Json index = Json::array();
        Json axes = Json::array();
        for (int i = 0; i < n; ++i) {
            index.push_back(cell.index[i]);
            if ((cell.axes >> i) & 1U) axes.push_back(i);
        }
        list.push_back({{"cell", Json::array({cell.degree, index, axes})}, {"coeff", coeff}});
    }
    return list;
}

Chain chain_from_json(const Json& json, const GridComplex& complex)
{
    if (!json.is_array()) throw ConfigError("a chain is a JSON array of terms");
    std::optional<Chain> chain;
    try {
        for (const auto& term : json) {
            const auto& cell_json = term.at("cell");
            Cell cell;
            cell.degree = cell_json.at(0).get<int>();
            const auto index = cell_json.at(1).get<std::vector<int>>();
            if (static_cast<int>(index.size()) != complex.dimension())
                throw MismatchError("chain cell index has the wrong dimension");
            std::copy(index.begin(), index.end(), cell.index.begin());
            for (int axis : cell_json.at(2).get<std::vector<int>>()) cell.axes |= 1U << axis;
            if (!chain) chain.emplace(complex, cell.degree);
            if (cell.degree != chain->degree()) throw DegreeError("chain terms have mixed degrees");
            chain->add(cell, term.at("coeff").get<long long>());
        }
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("malformed chain: ") + e.what());
    }
    if (!chain) throw ConfigError("an empty chain carries no degree");
    return *chain;
}

std::string to_csv(const CandidateReport& report)
{
    std::ostringstream out;
    out << "mask,residual,entropy\n";
    for (const auto& c : report.candidates)
        out << c.mask << ',' << format_number(c.residual) << ',' << csv_number(c.entropy) << '\n';
    return out.str();
}

std::string to_csv(const ConvergenceTable& table)
{
    std::ostringstream out;
    out << "resolution,value,abs_error,observed_order\n";
    for (const auto& r : table.rows)
        out << r.resolution << ',' << format_number(r.value) << ',' << csv_number(r.abs_error) << ','
            << csv_number(r.observed_order) << '\n';
    return out.str();
}

void emit_report(std::string_view text, const std::string& path, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open '" + path + "' for writing");
    file << text;
    if (!file) throw ConfigError("failed writing '" + path + "'");
}

} // namespace stokes
