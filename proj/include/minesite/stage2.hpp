#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "economics.hpp"
#include "mask.hpp"
#include "raster.hpp"
#include "regions.hpp"

namespace minesite {

enum class SideRounding {
    CeilInt,  // ceil(sqrt(area))
    CeilMult5 // ceil(sqrt(area)) rounded up to a multiple of 5 m
};

/// Land-use status categories of the national plot map.
namespace landuse {
inline constexpr int Urban = 1;
inline constexpr int Agricultural = 2;
inline constexpr int Forestry = 3;
inline constexpr int Industrial = 4;
inline constexpr int Heritage = 5;
inline constexpr int Reserved = 6;
} // namespace landuse

struct ScreeningParams {
    double max_slope_deg = 6.0;
    double stride_m = 20.0;
    SideRounding side_rounding = SideRounding::CeilMult5;
    std::set<int> allowed_landuse_codes = {landuse::Agricultural, landuse::Forestry, landuse::Industrial};
};

inline void validate(const ScreeningParams& sp) {
    if (!(sp.max_slope_deg > 0.0 && sp.max_slope_deg < 90.0))
        fail(ErrorKind::Validation, "screening.max_slope_deg must be in (0, 90)");
    if (!(sp.stride_m > 0.0) || !std::isfinite(sp.stride_m))
        fail(ErrorKind::Validation, "screening.stride_m must be > 0");
}

struct CandidateSite {
    std::string region_code;
    std::int64_t anchor_col = 0; // top-left pixel of the window
    std::int64_t anchor_row = 0;
    std::int64_t window_cols = 0;
    std::int64_t window_rows = 0;
    /// Unit-site rectangle in world coordinates.
    BBox footprint;
    double max_slope_deg = 0.0;
    bool landuse_ok = true;

    Polygon polygon() const { return rectangle(footprint.min_x, footprint.min_y, footprint.max_x, footprint.max_y); }

    friend bool operator<(const CandidateSite& a, const CandidateSite& b) {
        return std::tie(a.anchor_row, a.anchor_col) < std::tie(b.anchor_row, b.anchor_col);
    }
};

inline double unit_site_side(double net_area_m2, SideRounding rounding) {
    if (!(net_area_m2 > 0.0)) return 0.0;
    const double side = std::ceil(std::sqrt(net_area_m2));
    if (rounding == SideRounding::CeilInt) return side;
    return std::ceil(side / 5.0) * 5.0;
}

/// Pixels needed to cover `side_m`; at least one for any positive side.
inline std::int64_t window_pixels(double side_m, double resolution_m) {
    if (!(resolution_m > 0.0)) fail(ErrorKind::Domain, "resolution must be > 0");
    if (!(side_m > 0.0)) return 0;
    const double px = std::ceil(side_m / resolution_m - 1e-9);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(px));
}

/// Metric stride to whole pixels: max(1, round(stride / resolution)).
inline std::int64_t stride_pixels(double stride_m, double resolution_m) {
    if (!(resolution_m > 0.0)) fail(ErrorKind::Domain, "resolution must be > 0");
    return std::max<std::int64_t>(1, std::llround(stride_m / resolution_m));
}

struct WindowSize {
    std::int64_t cols = 1;
    std::int64_t rows = 1;
};

struct SearchOptions {
    std::string region_code;
    /// Footprint side lengths in metres; defaults to the window's pixel extent.
    std::optional<double> site_width_m;
    std::optional<double> site_height_m;
    /// Row-band workers; 0 means hardware concurrency.
    unsigned threads = 1;
};

struct ScanResult {
    std::vector<CandidateSite> sites; // sorted by (row, col)
    std::vector<std::string> warnings;
};

namespace detail {

inline void scan_band(const Raster& slope, WindowSize win, std::int64_t stride, double theta,
                      std::int64_t first_anchor_row, std::int64_t last_anchor_row, const SearchOptions& opt,
                      double site_w, double site_h, std::vector<CandidateSite>& out) {
    const auto W = static_cast<std::int64_t>(slope.width());
    const auto& t = slope.transform();
    const double sx = t.a >= 0.0 ? 1.0 : -1.0;
    const double sy = t.e >= 0.0 ? 1.0 : -1.0;
    std::vector<std::int32_t> vrun(static_cast<std::size_t>(W), 0);
    std::vector<std::int32_t> hrun(static_cast<std::size_t>(W), 0);

    const std::int64_t last_row = last_anchor_row + win.rows - 1;
    for (std::int64_t r = first_anchor_row; r <= last_row; ++r) {
        const float* row = slope.row_ptr(static_cast<std::size_t>(r));
        for (std::int64_t c = 0; c < W; ++c) {
            const float v = row[c];
            const bool ok = !slope.is_nodata(v) && static_cast<double>(v) < theta;
            vrun[c] = ok ? vrun[c] + 1 : 0;
        }
        const std::int64_t k = r - win.rows + 1; // anchor row whose window ends here
        if (k < first_anchor_row || (k - first_anchor_row) % stride != 0) continue;

        std::int32_t run = 0;
        for (std::int64_t c = 0; c < W; ++c) {
            run = vrun[c] >= win.rows ? run + 1 : 0;
            hrun[c] = run;
        }
        for (std::int64_t i = 0; i + win.cols <= W; i += stride) {
            if (hrun[i + win.cols - 1] < win.cols) continue;
            float mx = std::numeric_limits<float>::lowest();
            for (std::int64_t rr = k; rr < k + win.rows; ++rr) {
                const float* p = slope.row_ptr(static_cast<std::size_t>(rr)) + i;
                for (std::int64_t cc = 0; cc < win.cols; ++cc) mx = std::max(mx, p[cc]);
            }
            CandidateSite s;
            s.region_code = opt.region_code;
            s.anchor_col = i;
            s.anchor_row = k;
            s.window_cols = win.cols;
            s.window_rows = win.rows;
            const WorldPoint ul = pixel_to_world(t, static_cast<double>(i), static_cast<double>(k));
            s.footprint.expand(ul);
            s.footprint.expand({ul.x + sx * site_w, ul.y + sy * site_h});
            s.max_slope_deg = mx;
            out.push_back(std::move(s));
        }
    }
}

} // namespace detail

/**
 * Emits every window position (stepping `stride_px` in both directions)
 * whose pixels are all valid and strictly below `theta`. The work is split
 * into row bands; output is identical for any band count.
 */
inline ScanResult sliding_window_search(const Raster& slope, WindowSize win, std::int64_t stride_px, double theta,
                                        const SearchOptions& opt = {}) {
    if (win.cols < 1 || win.rows < 1) fail(ErrorKind::Domain, "window must be at least 1x1 pixel");
    if (stride_px < 1) fail(ErrorKind::Domain, "stride must be at least 1 pixel");
    ScanResult res;
    const auto W = static_cast<std::int64_t>(slope.width());
    const auto H = static_cast<std::int64_t>(slope.height());
    if (win.cols > W || win.rows > H) {
        res.warnings.push_back("window " + std::to_string(win.cols) + "x" + std::to_string(win.rows) +
                               " px larger than raster " + std::to_string(W) + "x" + std::to_string(H));
        return res;
    }
    const double site_w = opt.site_width_m.value_or(static_cast<double>(win.cols) * slope.resolution());
    const double site_h = opt.site_height_m.value_or(static_cast<double>(win.rows) * slope.resolution_y());

    const std::int64_t anchor_rows = (H - win.rows) / stride_px + 1;
    unsigned threads = opt.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.threads;
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, anchor_rows));

    std::vector<std::vector<CandidateSite>> parts(threads);
    auto band = [&](unsigned b) {
        const std::int64_t lo = anchor_rows * b / threads;
        const std::int64_t hi = anchor_rows * (b + 1) / threads;
        if (hi > lo)
            detail::scan_band(slope, win, stride_px, theta, lo * stride_px, (hi - 1) * stride_px, opt, site_w,
                              site_h, parts[b]);
    };
    if (threads == 1) {
        band(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned b = 0; b < threads; ++b) pool.emplace_back(band, b);
    }
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    res.sites.reserve(total);
    for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(res.sites));
    return res;
}

inline bool landuse_allowed(const Raster& landuse, const CandidateSite& s, const std::set<int>& allowed) {
    for (std::int64_t r = s.anchor_row; r < s.anchor_row + s.window_rows; ++r)
        for (std::int64_t c = s.anchor_col; c < s.anchor_col + s.window_cols; ++c) {
            const float v = landuse.at(static_cast<std::size_t>(c), static_cast<std::size_t>(r));
            if (landuse.is_nodata(v) || !allowed.count(static_cast<int>(std::lround(v)))) return false;
        }
    return true;
}

/// Sets `landuse_ok` on every site from its full footprint.
inline void flag_landuse(std::vector<CandidateSite>& sites, const Raster& landuse, const std::set<int>& allowed,
                         const Raster& reference) {
    if (!landuse.co_registered(reference, 1e-6))
        fail(ErrorKind::CoRegistration, "land-use raster is not aligned with the slope grid");
    for (auto& s : sites) {
        if (s.anchor_col < 0 || s.anchor_row < 0 ||
            s.anchor_col + s.window_cols > static_cast<std::int64_t>(landuse.width()) ||
            s.anchor_row + s.window_rows > static_cast<std::int64_t>(landuse.height()))
            fail(ErrorKind::Domain, "site footprint outside land-use raster");
        s.landuse_ok = landuse_allowed(landuse, s, allowed);
    }
}

/// Sites whose every footprint pixel carries an allowed land-use code.
inline std::vector<CandidateSite> landuse_filter(std::vector<CandidateSite> sites, const Raster& landuse,
                                                 const std::set<int>& allowed, const Raster& reference) {
    flag_landuse(sites, landuse, allowed, reference);
    std::erase_if(sites, [](const CandidateSite& s) { return !s.landuse_ok; });
    return sites;
}

struct RegionScreening {
    std::string region_code;
    double site_side_m = 0.0;
    WindowSize window;
    std::int64_t stride_px = 1;
    /// Slope-feasible sites; `landuse_ok` carries the land-use verdict.
    std::vector<CandidateSite> initial;
    std::vector<CandidateSite> available;
    std::vector<std::string> warnings;

    double retention_ratio() const {
        return initial.empty() ? 0.0 : static_cast<double>(available.size()) / static_cast<double>(initial.size());
    }
};

/**
 * Clip both rasters to the region, size the window from the plan's net
 * area, search, and filter by land use. Anchors are reported in the grid of
 * the unclipped input rasters. A null `landuse` accepts every site.
 */
inline RegionScreening screen_region(const RegionRecord& region, const RegionPlan& plan, const Raster& slope,
                                     const Raster* landuse, const ScreeningParams& sp, unsigned threads = 1) {
    validate(sp);
    if (!(plan.net_area_m2 > 0.0))
        fail(ErrorKind::Domain, "region " + region.region_code + " has no net area to site");
    if (landuse && !landuse->co_registered(slope, 1e-6))
        fail(ErrorKind::CoRegistration, "land-use raster is not aligned with the slope raster");

    RegionScreening out;
    out.region_code = region.region_code;
    out.site_side_m = unit_site_side(plan.net_area_m2, sp.side_rounding);
    out.window = {window_pixels(out.site_side_m, slope.resolution()),
                  window_pixels(out.site_side_m, slope.resolution_y())};
    out.stride_px = stride_pixels(sp.stride_m, slope.resolution());

    const PixelWindow pw = clip_window(slope, region.boundary);
    const Raster slope_c = mask_clip(slope, region.boundary);

    SearchOptions opt;
    opt.region_code = region.region_code;
    opt.site_width_m = out.site_side_m;
    opt.site_height_m = out.site_side_m;
    opt.threads = threads;
    ScanResult scan = sliding_window_search(slope_c, out.window, out.stride_px, sp.max_slope_deg, opt);
    out.warnings = std::move(scan.warnings);
    out.initial = std::move(scan.sites);

    if (landuse) {
        const Raster landuse_c = mask_clip(*landuse, region.boundary);
        flag_landuse(out.initial, landuse_c, sp.allowed_landuse_codes, slope_c);
    }
    for (auto& s : out.initial) {
        s.anchor_col += static_cast<std::int64_t>(pw.col0);
        s.anchor_row += static_cast<std::int64_t>(pw.row0);
        if (s.landuse_ok) out.available.push_back(s);
    }
    return out;
}

} // namespace minesite
