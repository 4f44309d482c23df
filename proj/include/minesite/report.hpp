#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"
#include "stage1.hpp"
#include "stage2.hpp"

namespace minesite::report {

/// Cents, fixed two decimals; negative zero is printed as zero.
inline std::string usd(double v) {
    if (std::abs(v) < 0.005) v = 0.0;
    return fmt::format("{:.2f}", v);
}

inline std::string millions(double v) { return usd(v / 1e6); }

inline std::string coord(double v) {
    if (std::abs(v) < 5e-7) v = 0.0;
    return fmt::format("{:.6f}", v);
}

inline std::string join(const std::vector<std::string>& v, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write " + p.string());
    return out;
}

inline void close_out(std::ofstream& out, const std::filesystem::path& p) {
    out.close();
    if (!out) fail(ErrorKind::Io, "write failed: " + p.string());
}

/// Columns: K, regions, pi_orig_usd, land_cost_usd, infra_cost_usd, pi_adj_usd.
inline void write_profit_table(const std::filesystem::path& p, const SelectionResult& r) {
    auto out = open_out(p);
    csv::write_row(out, {"K", "regions", "pi_orig_usd", "land_cost_usd", "infra_cost_usd", "pi_adj_usd"});
    for (const auto& row : r.per_k)
        csv::write_row(out, {std::to_string(row.k), join(row.regions, ";"), usd(row.pi_orig_usd),
                             usd(row.land_cost_usd), usd(row.infra_cost_usd), usd(row.pi_adj_usd)});
    close_out(out, p);
}

/// (K, Pi_adj) pairs for plotting the profit curve.
inline void write_profit_curve(const std::filesystem::path& p, const SelectionResult& r) {
    auto out = open_out(p);
    csv::write_row(out, {"K", "pi_adj_usd"});
    for (const auto& row : r.per_k) csv::write_row(out, {std::to_string(row.k), usd(row.pi_adj_usd)});
    close_out(out, p);
}

inline nlohmann::json plan_json(const RegionPlan& p) {
    return {{"region_code", p.region_code},
            {"n_miners", p.n_miners},
            {"power_mw", p.power_mw},
            {"annual_energy_kwh", p.annual_energy_kwh},
            {"annual_revenue_usd", p.annual_revenue_usd},
            {"annual_depreciation_usd", p.annual_depreciation_usd},
            {"annual_energy_cost_usd", p.annual_energy_cost_usd},
            {"annual_land_cost_usd", p.annual_land_cost_usd},
            {"containers", p.containers},
            {"net_area_m2", p.net_area_m2},
            {"gross_area_m2", p.gross_area_m2}};
}

inline nlohmann::json selection_json(const SelectionResult& r) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& row : r.per_k)
        table.push_back({{"k", row.k},
                         {"regions", row.regions},
                         {"pi_orig_usd", row.pi_orig_usd},
                         {"land_cost_usd", row.land_cost_usd},
                         {"infra_cost_usd", row.infra_cost_usd},
                         {"pi_adj_usd", row.pi_adj_usd}});
    nlohmann::json plans = nlohmann::json::array();
    for (const auto& p : r.plans_star) plans.push_back(plan_json(p));
    return {{"k_star", r.k_star},        {"regions_star", r.regions_star}, {"pi_max_usd", r.pi_max_usd},
            {"no_surplus", r.no_surplus}, {"warnings", r.warnings},        {"plans", plans},
            {"per_k", table}};
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
    auto out = open_out(p);
    out << j.dump(2) << '\n';
    close_out(out, p);
}

/// Region codes of Y* from a selection JSON written by write_json(selection_json(...)).
inline std::vector<std::string> read_selection_codes(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) fail(ErrorKind::Io, "cannot open selection " + p.string());
    try {
        const auto j = nlohmann::json::parse(in);
        return j.at("regions_star").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Validation, p.string() + ": not a selection file: " + e.what());
    }
}

/// RFC-7946 FeatureCollection of unit-site rectangles.
inline void write_sites_geojson(std::ostream& out, const std::vector<CandidateSite>& sites) {
    std::string buf;
    buf.reserve(1 << 16);
    auto it = std::back_inserter(buf);
    out << "{\"type\":\"FeatureCollection\",\"features\":[";
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const auto& s = sites[i];
        const auto& b = s.footprint;
        buf.clear();
        if (i) buf += ',';
        buf += "\n{\"type\":\"Feature\",\"geometry\":{\"type\":\"Polygon\",\"coordinates\":[[";
        const double xs[] = {b.min_x, b.max_x, b.max_x, b.min_x, b.min_x};
        const double ys[] = {b.min_y, b.min_y, b.max_y, b.max_y, b.min_y};
        for (int v = 0; v < 5; ++v) fmt::format_to(it, "{}[{},{}]", v ? "," : "", coord(xs[v]), coord(ys[v]));
        fmt::format_to(it,
                       "]]}},\"properties\":{{\"region_code\":{},\"anchor_col\":{},\"anchor_row\":{},"
                       "\"max_slope_deg\":{},\"landuse_ok\":{}}}}}",
                       nlohmann::json(s.region_code).dump(), s.anchor_col, s.anchor_row, coord(s.max_slope_deg),
                       s.landuse_ok ? "true" : "false");
        out << buf;
    }
    out << "\n]}\n";
}

inline void write_sites_geojson(const std::filesystem::path& p, const std::vector<CandidateSite>& sites) {
    auto out = open_out(p);
    write_sites_geojson(out, sites);
    close_out(out, p);
}

struct RegionSummary {
    std::string region_code;
    std::size_t initial_count = 0;
    std::size_t available_count = 0;

    double retention_ratio() const {
        return initial_count == 0 ? 0.0 : static_cast<double>(available_count) / static_cast<double>(initial_count);
    }
};

inline RegionSummary summarize(const RegionScreening& r) {
    return {r.region_code, r.initial.size(), r.available.size()};
}

/// Columns: region_code, initial_count, available_count, retention_ratio.
inline void write_stage2_summary(const std::filesystem::path& p, const std::vector<RegionSummary>& rows) {
    auto out = open_out(p);
    csv::write_row(out, {"region_code", "initial_count", "available_count", "retention_ratio"});
    for (const auto& r : rows)
        csv::write_row(out, {r.region_code, std::to_string(r.initial_count), std::to_string(r.available_count),
                             fmt::format("{:.6f}", r.retention_ratio())});
    close_out(out, p);
}

} // namespace minesite::report
