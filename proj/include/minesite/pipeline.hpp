#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "config.hpp"
#include "raster_io.hpp"
#include "regions.hpp"
#include "report.hpp"
#include "stage1.hpp"
#include "stage2.hpp"

namespace minesite {

namespace fs = std::filesystem;

/// Writes whole lines so concurrent writers cannot interleave mid-line.
class LineLog {
public:
    explicit LineLog(std::ostream& out) : out_(out) {}
    void line(const std::string& s) { out_ << (s + "\n") << std::flush; }

private:
    std::ostream& out_;
};

struct Stage1Run {
    RegionLoadResult data;
    SelectionResult selection;
    std::vector<std::string> outputs; // relative to the output directory
};

struct Stage2Run {
    std::vector<report::RegionSummary> summaries;
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;
};

struct SweepRow {
    double param_value = 0.0;
    std::int64_t k_star = 0;
    double pi_max_usd = 0.0;
};

namespace detail {

inline RegionLoadResult load_areal(const RunConfig& cfg, LineLog& log) {
    require_paths(cfg, {"areal_csv", "geometry"});
    RegionLoadResult data = load_regions(cfg.paths.areal_csv, cfg.paths.geometry);
    for (const auto& ex : data.excluded) log.line("excluded region " + ex.region_code + ": " + ex.reason);
    for (const auto& w : data.warnings) log.line("warning: " + w);
    if (data.regions.empty()) fail(ErrorKind::Validation, "no region has complete surplus, price, and geometry data");
    return data;
}

inline void log_selection(const SelectionResult& s, LineLog& log) {
    log.line("K  regions                         Pi_orig($M)  L_K($M)  I_K($M)  Pi_adj($M)");
    for (const auto& r : s.per_k)
        log.line(fmt::format("{:<2} {:<31} {:>11} {:>8} {:>8} {:>11}", r.k, report::join(r.regions, ";"),
                             report::millions(r.pi_orig_usd), report::millions(r.land_cost_usd),
                             report::millions(r.infra_cost_usd), report::millions(r.pi_adj_usd)));
    log.line(fmt::format("K* = {}, Y* = {{{}}}, Pi_max = ${}M", s.k_star, report::join(s.regions_star, ", "),
                         report::millions(s.pi_max_usd)));
    log.line("region      machines  energy(GWh)  revenue($M)  depreciation($M)  net($M)");
    for (const auto& p : s.plans_star)
        log.line(fmt::format("{:<10} {:>9} {:>12} {:>12} {:>17} {:>8}", p.region_code, p.n_miners,
                             report::usd(p.annual_energy_kwh / 1e6), report::millions(p.annual_revenue_usd),
                             report::millions(p.annual_depreciation_usd),
                             report::millions(p.annual_revenue_usd - p.annual_depreciation_usd)));
    for (const auto& w : s.warnings) log.line("warning: " + w);
}

} // namespace detail

inline Stage1Run run_stage1(const RunConfig& cfg, const RegionLoadResult& data, const fs::path& out_dir,
                            std::ostream& console) {
    LineLog log(console);
    Stage1Run run;
    run.data = data;
    run.selection = select_optimal(data.regions, cfg.k_max, cfg.stage1_params());
    detail::log_selection(run.selection, log);
    report::write_profit_table(out_dir / "stage1" / "stage1_table.csv", run.selection);
    report::write_profit_curve(out_dir / "stage1" / "profit_vs_k.csv", run.selection);
    report::write_json(out_dir / "stage1" / "selection.json", report::selection_json(run.selection));
    run.outputs = {"stage1/stage1_table.csv", "stage1/profit_vs_k.csv", "stage1/selection.json"};
    return run;
}

/// Ingest areal data, select regions, and write the stage-1 artifacts.
inline Stage1Run run_stage1(const RunConfig& cfg, const fs::path& out_dir, std::ostream& console) {
    validate(cfg);
    LineLog log(console);
    return run_stage1(cfg, detail::load_areal(cfg, log), out_dir, console);
}

/**
 * Screens each selected region and writes `<region_code>.geojson` plus a
 * summary CSV. Rasters are loaded before any region is processed.
 */
inline Stage2Run run_stage2(const RunConfig& cfg, const std::vector<std::string>& codes,
                            const RegionLoadResult& data, const fs::path& out_dir, std::ostream& console,
                            unsigned threads = 1) {
    LineLog log(console);
    Stage2Run run;
    require_paths(cfg, {"slope_raster"});
    if (!cfg.paths.landuse_raster.empty()) require_paths(cfg, {"landuse_raster"});
    if (codes.empty()) {
        run.warnings.push_back("empty region selection; stage 2 produced no files");
        log.line("warning: " + run.warnings.back());
        return run;
    }
    std::map<std::string, const RegionRecord*> by_code;
    for (const auto& r : data.regions) by_code[r.region_code] = &r;
    for (const auto& c : codes)
        if (!by_code.count(c)) fail(ErrorKind::Data, "selected region " + c + " has no areal data or geometry");

    const Raster slope = load_raster(cfg.paths.slope_raster);
    std::optional<Raster> landuse;
    if (!cfg.paths.landuse_raster.empty()) landuse = load_raster(cfg.paths.landuse_raster);

    std::size_t tot_initial = 0, tot_available = 0;
    for (const auto& code : codes) {
        const RegionRecord& region = *by_code.at(code);
        const RegionPlan plan = build_region_plan(region, cfg.econ);
        const std::string rel = "stage2/" + code + ".geojson";
        if (!(plan.net_area_m2 > 0.0)) {
            run.warnings.push_back("region " + code + " has no installable miners; nothing to site");
            log.line("warning: " + run.warnings.back());
            report::write_sites_geojson(out_dir / rel, {});
            run.summaries.push_back({code, 0, 0});
            run.outputs.push_back(rel);
            continue;
        }
        RegionScreening scr =
            screen_region(region, plan, slope, landuse ? &*landuse : nullptr, cfg.screening, threads);
        for (const auto& w : scr.warnings) {
            run.warnings.push_back("region " + code + ": " + w);
            log.line("warning: " + run.warnings.back());
        }
        report::write_sites_geojson(out_dir / rel, scr.initial);
        run.outputs.push_back(rel);
        run.summaries.push_back(report::summarize(scr));
        tot_initial += scr.initial.size();
        tot_available += scr.available.size();
        log.line(fmt::format("{}: unit site {:.0f}m x {:.0f}m ({}x{} px, stride {} px), initial {}, available {}",
                             code, scr.site_side_m, scr.site_side_m, scr.window.cols, scr.window.rows, scr.stride_px,
                             scr.initial.size(), scr.available.size()));
    }
    report::write_stage2_summary(out_dir / "stage2" / "stage2_summary.csv", run.summaries);
    run.outputs.push_back("stage2/stage2_summary.csv");
    log.line(fmt::format("total: initial {}, available {}", tot_initial, tot_available));
    return run;
}

inline Stage2Run run_stage2(const RunConfig& cfg, const std::vector<std::string>& codes, const fs::path& out_dir,
                            std::ostream& console, unsigned threads = 1) {
    validate(cfg);
    require_paths(cfg, {"slope_raster"});
    LineLog log(console);
    const RegionLoadResult data = detail::load_areal(cfg, log);
    return run_stage2(cfg, codes, data, out_dir, console, threads);
}

/**
 * Stage 1 then stage 2, with a run manifest. A failing stage stops the run;
 * the manifest is still written and marks the outputs as partial.
 */
inline nlohmann::json run_pipeline(const RunConfig& cfg, const fs::path& out_dir, std::ostream& console,
                                   unsigned threads = 1) {
    using clock = std::chrono::steady_clock;
    nlohmann::json manifest = {
        {"tool", "minesite"},
        {"config_hash", config_hash(cfg)},
        {"inputs",
         {{"areal_csv", cfg.paths.areal_csv},
          {"geometry", cfg.paths.geometry},
          {"slope_raster", cfg.paths.slope_raster},
          {"landuse_raster", cfg.paths.landuse_raster}}},
        {"stages", nlohmann::json::array()},
        {"warnings", nlohmann::json::array()},
        {"partial", false},
        {"error", nullptr}};
    auto ms = [](clock::time_point a) {
        return std::chrono::duration<double, std::milli>(clock::now() - a).count();
    };
    auto write_manifest = [&] { report::write_json(out_dir / "manifest.json", manifest); };

    std::string stage = "stage1";
    try {
        validate(cfg);
        require_paths(cfg, {"areal_csv", "geometry", "slope_raster"});
        if (!cfg.paths.landuse_raster.empty()) require_paths(cfg, {"landuse_raster"});
        auto t0 = clock::now();
        LineLog log(console);
        const Stage1Run s1 = run_stage1(cfg, detail::load_areal(cfg, log), out_dir, console);
        manifest["stages"].push_back(
            {{"name", "stage1"}, {"status", "complete"}, {"elapsed_ms", ms(t0)}, {"outputs", s1.outputs}});
        for (const auto& ex : s1.data.excluded)
            manifest["warnings"].push_back("excluded region " + ex.region_code + ": " + ex.reason);
        for (const auto& w : s1.selection.warnings) manifest["warnings"].push_back(w);

        stage = "stage2";
        t0 = clock::now();
        const Stage2Run s2 = run_stage2(cfg, s1.selection.regions_star, s1.data, out_dir, console, threads);
        manifest["stages"].push_back(
            {{"name", "stage2"}, {"status", "complete"}, {"elapsed_ms", ms(t0)}, {"outputs", s2.outputs}});
        for (const auto& w : s2.warnings) manifest["warnings"].push_back(w);
    } catch (const Error& e) {
        manifest["stages"].push_back({{"name", stage}, {"status", "failed"}});
        manifest["partial"] = true;
        manifest["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
        write_manifest();
        throw;
    }
    write_manifest();
    return manifest;
}

/// Re-runs stage 1 for each value of the configured sweep parameter.
inline std::vector<SweepRow> run_sweep(const RunConfig& cfg, const fs::path& out_dir, std::ostream& console) {
    validate(cfg);
    if (!cfg.sweep) fail(ErrorKind::Validation, "config: [sweep] section is required for the sweep command");
    LineLog log(console);
    const NumericField& field = economic_field(cfg.sweep->parameter);
    const RegionLoadResult data = detail::load_areal(cfg, log);

    std::vector<SweepRow> rows;
    for (const double v : cfg.sweep->values()) {
        RunConfig c = cfg;
        field.ref(c.econ) = v;
        try {
            validate(c.econ);
        } catch (const Error& e) {
            fail(ErrorKind::Validation, fmt::format("sweep value {} for {}: {}", v, field.name, e.what()));
        }
        const SelectionResult s = select_optimal(data.regions, c.k_max, c.stage1_params());
        rows.push_back({v, s.k_star, s.pi_max_usd});
        log.line(fmt::format("{} = {:.6g}: K* = {}, Pi_max = ${}M", field.name, v, s.k_star,
                             report::millions(s.pi_max_usd)));
    }
    const fs::path p = out_dir / "sweep" / "sweep.csv";
    auto out = report::open_out(p);
    csv::write_row(out, {"param_value", "k_star", "pi_max_usd"});
    for (const auto& r : rows)
        csv::write_row(out, {fmt::format("{:.17g}", r.param_value), std::to_string(r.k_star),
                             report::usd(r.pi_max_usd)});
    report::close_out(out, p);
    return rows;
}

} // namespace minesite
