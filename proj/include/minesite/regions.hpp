#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ascii_grid.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "geometry.hpp"

namespace minesite {

struct RegionRecord {
    std::string region_code;
    std::string name;
    double annual_surplus_kwh = 0.0;
    std::optional<std::array<double, 12>> monthly_surplus_kwh;
    double land_price_krw_m2 = 0.0;
    MultiPolygon boundary;
};

/// Monthly sums may differ from the annual figure by at most this fraction.
inline constexpr double kMonthlyTolerance = 0.005;

inline void validate(const RegionRecord& r) {
    const std::string who = "region " + r.region_code;
    if (r.region_code.empty()) fail(ErrorKind::Validation, "region with empty code");
    if (!(r.annual_surplus_kwh >= 0.0) || !std::isfinite(r.annual_surplus_kwh))
        fail(ErrorKind::Validation, who + ": annual surplus must be >= 0");
    if (r.monthly_surplus_kwh) {
        double sum = 0.0;
        for (double m : *r.monthly_surplus_kwh) {
            if (!(m >= 0.0)) fail(ErrorKind::Validation, who + ": negative monthly surplus");
            sum += m;
        }
        if (std::abs(sum - r.annual_surplus_kwh) > kMonthlyTolerance * std::max(r.annual_surplus_kwh, sum))
            fail(ErrorKind::Validation, who + ": monthly surplus does not sum to annual within 0.5%");
    }
    if (!(r.land_price_krw_m2 > 0.0) || !std::isfinite(r.land_price_krw_m2))
        fail(ErrorKind::Validation, who + ": land price must be > 0");
    if (!is_valid(r.boundary)) fail(ErrorKind::Validation, who + ": boundary is not a valid polygon");
}

struct Exclusion {
    std::string region_code;
    std::string reason;
};

struct RegionLoadResult {
    std::vector<RegionRecord> regions; // sorted by region_code
    std::vector<Exclusion> excluded;   // sorted by region_code
    std::vector<std::string> warnings;
};

namespace detail {

inline const std::set<int>& geographic_epsg() {
    static const std::set<int> codes = {4326, 4258, 4269, 4019, 4162, 4166, 4737, 4979, 4937};
    return codes;
}

/// Rejects GeoJSON whose declared or apparent CRS is not projected in metres.
inline void check_projected(const nlohmann::json& doc, const std::vector<MultiPolygon>& geoms,
                            const std::string& source) {
    if (doc.contains("crs")) {
        const auto& crs = doc["crs"];
        std::string name;
        if (crs.contains("properties") && crs["properties"].contains("name") &&
            crs["properties"]["name"].is_string())
            name = crs["properties"]["name"].get<std::string>();
        if (name.find("CRS84") != std::string::npos || name.find("CRS83") != std::string::npos)
            fail(ErrorKind::GeoReference, source + ": geometry CRS " + name + " is geographic");
        std::smatch m;
        static const std::regex epsg(R"(EPSG:{1,2}(\d+))");
        if (std::regex_search(name, m, epsg) && geographic_epsg().count(std::stoi(m[1].str())))
            fail(ErrorKind::GeoReference, source + ": geometry CRS " + name + " is geographic");
        return;
    }
    BBox all;
    for (const auto& g : geoms) {
        const BBox b = bounds(g);
        all.expand({b.min_x, b.min_y});
        all.expand({b.max_x, b.max_y});
    }
    if (!all.empty() && all.min_x >= -180.0 && all.max_x <= 180.0 && all.min_y >= -90.0 && all.max_y <= 90.0)
        fail(ErrorKind::GeoReference,
             source + ": coordinates look like longitude/latitude; declare a projected \"crs\" in metres");
}

inline Ring parse_ring(const nlohmann::json& j) {
    Ring r;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() < 2) fail(ErrorKind::Validation, "bad GeoJSON position");
        r.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return r;
}

inline Polygon parse_polygon(const nlohmann::json& rings) {
    if (!rings.is_array() || rings.empty()) fail(ErrorKind::Validation, "bad GeoJSON polygon");
    Polygon p;
    p.outer = parse_ring(rings[0]);
    for (std::size_t i = 1; i < rings.size(); ++i) p.holes.push_back(parse_ring(rings[i]));
    return p;
}

inline std::string code_of(const nlohmann::json& props) {
    if (!props.is_object() || !props.contains("region_code")) return {};
    const auto& v = props["region_code"];
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    return v.dump();
}

} // namespace detail

/// GeoJSON FeatureCollection keyed by the "region_code" property.
inline std::map<std::string, MultiPolygon> load_boundaries(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open geometry file " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Validation, path + ": invalid JSON: " + e.what());
    }
    if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features"))
        fail(ErrorKind::Validation, path + ": expected a GeoJSON FeatureCollection");

    std::map<std::string, MultiPolygon> out;
    std::vector<MultiPolygon> all;
    for (const auto& feat : doc["features"]) {
        const std::string code = detail::code_of(feat.value("properties", nlohmann::json::object()));
        if (code.empty()) fail(ErrorKind::Validation, path + ": feature without region_code");
        if (out.count(code)) fail(ErrorKind::Validation, path + ": duplicate region_code " + code);
        const auto& g = feat["geometry"];
        if (g.is_null()) continue;
        MultiPolygon mp;
        try {
            const std::string type = g.value("type", "");
            if (type == "Polygon") {
                mp.push_back(detail::parse_polygon(g["coordinates"]));
            } else if (type == "MultiPolygon") {
                for (const auto& poly : g["coordinates"]) mp.push_back(detail::parse_polygon(poly));
            } else {
                fail(ErrorKind::Validation, path + ": region " + code + " geometry is " + type);
            }
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::Validation, path + ": region " + code + ": " + e.what());
        }
        if (!is_valid(mp)) fail(ErrorKind::Validation, path + ": region " + code + " has invalid geometry");
        all.push_back(mp);
        out.emplace(code, std::move(mp));
    }
    detail::check_projected(doc, all, path);
    return out;
}

inline const std::vector<std::string>& areal_csv_columns() {
    static const std::vector<std::string> cols = {"region_code", "name",        "year",
                                                  "month",       "surplus_kwh", "land_price_krw_m2"};
    return cols;
}

namespace detail {

struct Accum {
    std::string name;
    std::set<std::string> years;
    std::optional<double> annual;
    std::map<int, std::optional<double>> months;
    std::optional<double> price;
    bool saw_annual_row = false;
};

inline std::optional<double> number_cell(const std::string& s, const std::string& where, const char* what) {
    std::string t = s;
    t.erase(0, t.find_first_not_of(" \t"));
    t.erase(t.find_last_not_of(" \t") + 1);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    if (!parse_double(t, v) || !std::isfinite(v))
        fail(ErrorKind::Validation, where + ": malformed " + what + " '" + s + "'");
    return v;
}

} // namespace detail

/**
 * Joins the areal CSV (surplus + land price per region) with region
 * boundaries. `month` holds 1-12 for monthly rows or "annual". Regions
 * lacking surplus, price, or geometry are excluded and reported.
 */
inline RegionLoadResult load_regions(const std::string& areal_csv_path, const std::string& geometry_path) {
    std::ifstream in(areal_csv_path);
    if (!in) fail(ErrorKind::Io, "cannot open areal CSV " + areal_csv_path);
    const auto rows = csv::read(in, areal_csv_path);
    if (rows.empty()) fail(ErrorKind::Validation, areal_csv_path + ": empty CSV");

    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < rows[0].fields.size(); ++i) {
        std::string h = rows[0].fields[i];
        h.erase(0, h.find_first_not_of(" \t\xEF\xBB\xBF"));
        h.erase(h.find_last_not_of(" \t") + 1);
        col[h] = i;
    }
    for (const auto& c : areal_csv_columns())
        if (!col.count(c)) fail(ErrorKind::Validation, areal_csv_path + ": missing column '" + c + "'");

    std::map<std::string, detail::Accum> acc;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string where = areal_csv_path + ":" + std::to_string(row.line);
        if (row.fields.size() != rows[0].fields.size())
            fail(ErrorKind::Validation, where + ": expected " + std::to_string(rows[0].fields.size()) +
                                            " fields, found " + std::to_string(row.fields.size()));
        auto cell = [&](const char* c) -> const std::string& { return row.fields[col.at(c)]; };
        const std::string code = cell("region_code");
        if (code.empty()) fail(ErrorKind::Validation, where + ": empty region_code");
        auto& a = acc[code];
        if (a.name.empty()) a.name = cell("name");
        if (!cell("year").empty()) a.years.insert(cell("year"));

        const auto surplus = detail::number_cell(cell("surplus_kwh"), where, "surplus_kwh");
        if (surplus && *surplus < 0.0)
            fail(ErrorKind::Validation, where + ": negative surplus_kwh for region " + code);
        const auto price = detail::number_cell(cell("land_price_krw_m2"), where, "land_price_krw_m2");
        if (price) {
            if (*price <= 0.0) fail(ErrorKind::Validation, where + ": land price must be > 0 for region " + code);
            if (a.price && std::abs(*a.price - *price) > 1e-9 * std::abs(*price))
                fail(ErrorKind::Validation, where + ": conflicting land prices for region " + code);
            a.price = price;
        }

        std::string month = cell("month");
        std::transform(month.begin(), month.end(), month.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (month == "annual" || month.empty()) {
            if (a.saw_annual_row) fail(ErrorKind::Validation, where + ": duplicate region_code " + code + " (annual)");
            a.saw_annual_row = true;
            a.annual = surplus;
        } else {
            double m = 0.0;
            if (!detail::parse_double(month, m) || m < 1 || m > 12 || m != std::floor(m))
                fail(ErrorKind::Validation, where + ": month must be 1-12 or 'annual', got '" + cell("month") + "'");
            const int mi = static_cast<int>(m);
            if (a.months.count(mi))
                fail(ErrorKind::Validation, where + ": duplicate region_code " + code + " for month " + month);
            a.months[mi] = surplus;
        }
        if (a.years.size() > 1) fail(ErrorKind::Validation, where + ": region " + code + " mixes several years");
    }

    const auto boundaries = load_boundaries(geometry_path);

    RegionLoadResult result;
    for (auto& [code, a] : acc) {
        std::vector<std::string> missing;
        std::optional<double> annual = a.annual;
        std::optional<std::array<double, 12>> monthly;
        if (!a.months.empty()) {
            double sum = 0.0;
            std::size_t present = 0;
            for (const auto& [m, v] : a.months)
                if (v) { sum += *v; ++present; }
            if (present == 12) {
                monthly.emplace();
                for (const auto& [m, v] : a.months) (*monthly)[static_cast<std::size_t>(m - 1)] = *v;
            } else if (present > 0 && !annual) {
                result.warnings.push_back("region " + code + ": only " + std::to_string(present) +
                                          " of 12 months present; annual surplus is their sum");
            }
            if (!annual && present > 0) annual = sum;
        }
        if (!annual) missing.push_back("surplus");
        if (!a.price) missing.push_back("land price");
        const auto geom = boundaries.find(code);
        if (geom == boundaries.end()) missing.push_back("geometry");
        if (!missing.empty()) {
            std::string reason = "missing ";
            for (std::size_t i = 0; i < missing.size(); ++i) reason += (i ? ", " : "") + missing[i];
            result.excluded.push_back({code, reason});
            continue;
        }
        RegionRecord rec{code, a.name, *annual, monthly, *a.price, geom->second};
        validate(rec);
        result.regions.push_back(std::move(rec));
    }
    for (const auto& [code, g] : boundaries)
        if (!acc.count(code)) result.excluded.push_back({code, "missing surplus, land price"});
    std::sort(result.excluded.begin(), result.excluded.end(),
              [](const Exclusion& x, const Exclusion& y) { return x.region_code < y.region_code; });
    return result;
}

} // namespace minesite
