#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <fmt/format.h>
#include <boost/property_tree/ptree.hpp>

#include "economics.hpp"
#include "stage1.hpp"
#include "stage2.hpp"

namespace minesite {

struct RunPaths {
    std::string areal_csv;
    std::string geometry;
    std::string slope_raster;
    std::string landuse_raster; // empty: no land-use filtering
    std::string output_dir = "out";
};

struct SweepSpec {
    std::string parameter; // e.g. "cost.fixed_opex_per_site_usd"
    double from = 0.0;
    double to = 0.0;
    std::int64_t steps = 0;

    std::vector<double> values() const {
        std::vector<double> v;
        for (std::int64_t i = 0; i < steps; ++i)
            v.push_back(steps == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1));
        return v;
    }
};

struct RunConfig {
    RunPaths paths;
    EconomicParams econ;
    ScreeningParams screening;
    std::int64_t k_max = 5;
    SearchMode mode = SearchMode::Exhaustive;
    std::size_t prefilter_m = 20;
    std::optional<SweepSpec> sweep;

    Stage1Params stage1_params() const { return {econ, mode, prefilter_m}; }
};

/// A numeric EconomicParams field addressable as "section.key".
struct NumericField {
    std::string name;
    std::function<double&(EconomicParams&)> ref;
};

inline const std::vector<NumericField>& economic_fields() {
    static const std::vector<NumericField> fields = {
        {"miner.power_kw", [](EconomicParams& p) -> double& { return p.miner.power_kw; }},
        {"miner.hashrate_ths", [](EconomicParams& p) -> double& { return p.miner.hashrate_ths; }},
        {"miner.capex_per_unit_usd", [](EconomicParams& p) -> double& { return p.miner.capex_per_unit_usd; }},
        {"miner.lifetime_years", [](EconomicParams& p) -> double& { return p.miner.lifetime_years; }},
        {"network.network_hashrate_ths", [](EconomicParams& p) -> double& { return p.network.network_hashrate_ths; }},
        {"network.block_reward_btc", [](EconomicParams& p) -> double& { return p.network.block_reward_btc; }},
        {"network.btc_price_usd", [](EconomicParams& p) -> double& { return p.network.btc_price_usd; }},
        {"network.blocks_per_year", [](EconomicParams& p) -> double& { return p.network.blocks_per_year; }},
        {"layout.area_per_container_m2", [](EconomicParams& p) -> double& { return p.layout.area_per_container_m2; }},
        {"layout.margin_ratio", [](EconomicParams& p) -> double& { return p.layout.margin_ratio; }},
        {"layout.gross_area_m2_per_mw", [](EconomicParams& p) -> double& { return p.layout.gross_area_m2_per_mw; }},
        {"cost.market_multiplier", [](EconomicParams& p) -> double& { return p.cost.market_multiplier; }},
        {"cost.land_amort_years", [](EconomicParams& p) -> double& { return p.cost.land_amort_years; }},
        {"cost.fixed_capex_per_site_usd", [](EconomicParams& p) -> double& { return p.cost.fixed_capex_per_site_usd; }},
        {"cost.variable_capex_per_mw_usd", [](EconomicParams& p) -> double& { return p.cost.variable_capex_per_mw_usd; }},
        {"cost.grid_fee_usd", [](EconomicParams& p) -> double& { return p.cost.grid_fee_usd; }},
        {"cost.grid_block_mw", [](EconomicParams& p) -> double& { return p.cost.grid_block_mw; }},
        {"cost.infra_lifetime_years", [](EconomicParams& p) -> double& { return p.cost.infra_lifetime_years; }},
        {"cost.fixed_opex_per_site_usd", [](EconomicParams& p) -> double& { return p.cost.fixed_opex_per_site_usd; }},
        {"cost.energy_price_usd_per_kwh", [](EconomicParams& p) -> double& { return p.cost.energy_price_usd_per_kwh; }},
        {"cost.fx_krw_per_usd", [](EconomicParams& p) -> double& { return p.cost.fx_krw_per_usd; }},
    };
    return fields;
}

inline const NumericField& economic_field(const std::string& name) {
    for (const auto& f : economic_fields())
        if (f.name == name) return f;
    std::string list;
    for (const auto& f : economic_fields()) list += (list.empty() ? "" : ", ") + f.name;
    fail(ErrorKind::Validation, "unknown sweep parameter '" + name + "'; sweepable fields: " + list);
}

namespace detail {

// Shortest text that round-trips to the same double.
inline std::string num(double v) { return fmt::format("{}", v); }

inline std::string join_codes(const std::set<int>& codes) {
    std::string s;
    for (int c : codes) s += (s.empty() ? "" : ",") + std::to_string(c);
    return s;
}

inline const char* mode_name(SearchMode m) { return m == SearchMode::Additive ? "additive" : "exhaustive"; }
inline const char* rounding_name(SideRounding r) { return r == SideRounding::CeilInt ? "ceil_int" : "ceil_mult5"; }
inline const char* fee_mode_name(GridFeeMode m) { return m == GridFeeMode::Pooled ? "pooled" : "per_site"; }

} // namespace detail

/// Canonical text form. With `annotated`, section comments are added for humans.
inline std::string dump_config(const RunConfig& c, bool annotated = true) {
    std::ostringstream o;
    auto comment = [&](const char* text) {
        if (annotated) o << "; " << text << '\n';
    };
    comment("minesite run configuration. Relative paths resolve against this file's directory.");
    o << "[paths]\n"
      << "areal_csv = " << c.paths.areal_csv << '\n'
      << "geometry = " << c.paths.geometry << '\n'
      << "slope_raster = " << c.paths.slope_raster << '\n'
      << "landuse_raster = " << c.paths.landuse_raster << '\n'
      << "output_dir = " << c.paths.output_dir << "\n\n";

    EconomicParams e = c.econ;
    std::string section;
    for (const auto& f : economic_fields()) {
        const auto dot = f.name.find('.');
        const std::string sec = f.name.substr(0, dot);
        if (sec != section) {
            if (!section.empty()) o << '\n';
            if (sec == "miner") comment("power_kw is the electrical draw per machine in kW");
            if (sec == "network") comment("default hashrate gives $8,944 per machine-year");
            o << '[' << sec << "]\n";
            if (sec == "layout") o << "miners_per_container = " << e.layout.miners_per_container << '\n';
            section = sec;
        }
        o << f.name.substr(dot + 1) << " = " << detail::num(f.ref(e)) << '\n';
        if (f.name == "cost.fx_krw_per_usd") {
            comment("grid_fee_mode: pooled | per_site");
            o << "grid_fee_mode = " << detail::fee_mode_name(e.cost.grid_fee_mode) << '\n';
        }
    }

    o << "\n[screening]\n"
      << "max_slope_deg = " << detail::num(c.screening.max_slope_deg) << '\n'
      << "stride_m = " << detail::num(c.screening.stride_m) << '\n';
    comment("side_rounding: ceil_int | ceil_mult5");
    o << "side_rounding = " << detail::rounding_name(c.screening.side_rounding) << '\n';
    comment("1 urban, 2 agricultural, 3 forestry, 4 industrial, 5 heritage, 6 reserved");
    o << "allowed_landuse_codes = " << detail::join_codes(c.screening.allowed_landuse_codes) << "\n\n";

    o << "[stage1]\n"
      << "k_max = " << c.k_max << '\n';
    comment("mode: additive | exhaustive");
    o << "mode = " << detail::mode_name(c.mode) << '\n'
      << "prefilter_m = " << c.prefilter_m << '\n';

    if (c.sweep) {
        o << "\n[sweep]\n"
          << "parameter = " << c.sweep->parameter << '\n'
          << "from = " << detail::num(c.sweep->from) << '\n'
          << "to = " << detail::num(c.sweep->to) << '\n'
          << "steps = " << c.sweep->steps << '\n';
    }
    return o.str();
}

/// FNV-1a over the canonical form minus the output directory.
inline std::string config_hash(const RunConfig& c) {
    RunConfig k = c;
    k.paths.output_dir.clear();
    const std::string s = dump_config(k, false);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

inline double parse_number(const std::string& field, const std::string& text) {
    double v = 0.0;
    std::string t = text;
    t.erase(0, t.find_first_not_of(" \t"));
    t.erase(t.find_last_not_of(" \t") + 1);
    if (!parse_double(t, v) || !std::isfinite(v))
        fail(ErrorKind::Validation, field + ": expected a number, got '" + text + "'");
    return v;
}

inline std::int64_t parse_integer(const std::string& field, const std::string& text) {
    const double v = parse_number(field, text);
    if (v != std::floor(v)) fail(ErrorKind::Validation, field + ": expected an integer, got '" + text + "'");
    return static_cast<std::int64_t>(v);
}

} // namespace detail

inline void validate(const RunConfig& c) {
    try {
        validate(c.econ);
        validate(c.screening);
    } catch (const Error& e) {
        fail(ErrorKind::Validation, std::string("config: ") + e.what());
    }
    if (c.k_max < 1) fail(ErrorKind::Validation, "config: stage1.k_max must be >= 1");
    if (c.prefilter_m < 1) fail(ErrorKind::Validation, "config: stage1.prefilter_m must be >= 1");
    if (c.sweep) {
        economic_field(c.sweep->parameter);
        if (c.sweep->steps < 2) fail(ErrorKind::Validation, "config: sweep.steps must be >= 2");
    }
}

/// Parses INI text. Unknown sections or keys are rejected with their field path.
inline RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {}) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        fail(ErrorKind::Validation, std::string("config: ") + e.what());
    }

    RunConfig c;
    auto resolve = [&](const std::string& p) -> std::string {
        if (p.empty() || base_dir.empty() || std::filesystem::path(p).is_absolute()) return p;
        return (base_dir / p).lexically_normal().string();
    };
    bool have_sweep = false;
    SweepSpec sweep;

    for (const auto& [sec, body] : tree) {
        if (body.empty() && !body.data().empty())
            fail(ErrorKind::Validation, "config: key '" + sec + "' outside a section");
        for (const auto& [key, node] : body) {
            const std::string field = sec + "." + key;
            const std::string v = node.get_value<std::string>();
            if (sec == "paths") {
                if (key == "areal_csv") c.paths.areal_csv = resolve(v);
                else if (key == "geometry") c.paths.geometry = resolve(v);
                else if (key == "slope_raster") c.paths.slope_raster = resolve(v);
                else if (key == "landuse_raster") c.paths.landuse_raster = resolve(v);
                else if (key == "output_dir") c.paths.output_dir = resolve(v);
                else fail(ErrorKind::Validation, "config: unknown field " + field);
            } else if (sec == "layout" && key == "miners_per_container") {
                c.econ.layout.miners_per_container = detail::parse_integer(field, v);
            } else if (sec == "cost" && key == "grid_fee_mode") {
                if (v == "pooled") c.econ.cost.grid_fee_mode = GridFeeMode::Pooled;
                else if (v == "per_site") c.econ.cost.grid_fee_mode = GridFeeMode::PerSite;
                else fail(ErrorKind::Validation, "config: " + field + " must be pooled or per_site");
            } else if (sec == "miner" || sec == "network" || sec == "layout" || sec == "cost") {
                bool found = false;
                for (const auto& f : economic_fields())
                    if (f.name == field) {
                        f.ref(c.econ) = detail::parse_number(field, v);
                        found = true;
                    }
                if (!found) fail(ErrorKind::Validation, "config: unknown field " + field);
            } else if (sec == "screening") {
                if (key == "max_slope_deg") c.screening.max_slope_deg = detail::parse_number(field, v);
                else if (key == "stride_m") c.screening.stride_m = detail::parse_number(field, v);
                else if (key == "side_rounding") {
                    if (v == "ceil_int") c.screening.side_rounding = SideRounding::CeilInt;
                    else if (v == "ceil_mult5") c.screening.side_rounding = SideRounding::CeilMult5;
                    else fail(ErrorKind::Validation, "config: " + field + " must be ceil_int or ceil_mult5");
                } else if (key == "allowed_landuse_codes") {
                    c.screening.allowed_landuse_codes.clear();
                    std::stringstream ss(v);
                    std::string tok;
                    while (std::getline(ss, tok, ','))
                        if (tok.find_first_not_of(" \t") != std::string::npos)
                            c.screening.allowed_landuse_codes.insert(
                                static_cast<int>(detail::parse_integer(field, tok)));
                } else fail(ErrorKind::Validation, "config: unknown field " + field);
            } else if (sec == "stage1") {
                if (key == "k_max") c.k_max = detail::parse_integer(field, v);
                else if (key == "mode") {
                    if (v == "additive") c.mode = SearchMode::Additive;
                    else if (v == "exhaustive") c.mode = SearchMode::Exhaustive;
                    else fail(ErrorKind::Validation, "config: " + field + " must be additive or exhaustive");
                } else if (key == "prefilter_m") {
                    const auto m = detail::parse_integer(field, v);
                    if (m < 1) fail(ErrorKind::Validation, "config: " + field + " must be >= 1");
                    c.prefilter_m = static_cast<std::size_t>(m);
                } else fail(ErrorKind::Validation, "config: unknown field " + field);
            } else if (sec == "sweep") {
                have_sweep = true;
                if (key == "parameter") sweep.parameter = v;
                else if (key == "from") sweep.from = detail::parse_number(field, v);
                else if (key == "to") sweep.to = detail::parse_number(field, v);
                else if (key == "steps") sweep.steps = detail::parse_integer(field, v);
                else fail(ErrorKind::Validation, "config: unknown field " + field);
            } else {
                fail(ErrorKind::Validation, "config: unknown section [" + sec + "]");
            }
        }
    }
    if (have_sweep) c.sweep = sweep;
    validate(c);
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::filesystem::absolute(path).parent_path());
}

/// Checks that the named input files exist; `what` lists "paths.*" keys.
inline void require_paths(const RunConfig& c, const std::vector<std::string>& what) {
    for (const auto& w : what) {
        const std::string* p = nullptr;
        if (w == "areal_csv") p = &c.paths.areal_csv;
        else if (w == "geometry") p = &c.paths.geometry;
        else if (w == "slope_raster") p = &c.paths.slope_raster;
        else if (w == "landuse_raster") p = &c.paths.landuse_raster;
        if (!p) fail(ErrorKind::Invariant, "unknown path key " + w);
        if (p->empty()) fail(ErrorKind::Validation, "config: paths." + w + " is not set");
        if (!std::filesystem::is_regular_file(*p))
            fail(ErrorKind::Io, "config: paths." + w + " does not exist: " + *p);
    }
}

} // namespace minesite
