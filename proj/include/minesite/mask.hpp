#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "geometry.hpp"
#include "raster.hpp"

namespace minesite {

/// Sub-grid of a raster, in source pixel indices.
struct PixelWindow {
    std::size_t col0 = 0;
    std::size_t row0 = 0;
    std::size_t cols = 0;
    std::size_t rows = 0;
};

namespace detail {

inline double snap_index(double v) {
    const double r = std::round(v);
    return std::abs(v - r) < 1e-9 ? r : v;
}

} // namespace detail

/// Pixels intersecting the boundary's bounding box, clamped to the raster.
template <typename T>
PixelWindow clip_window(const BasicRaster<T>& raster, const MultiPolygon& boundary) {
    const BBox bb = bounds(boundary);
    if (bb.empty()) fail(ErrorKind::EmptyExtent, "boundary polygon is empty");
    const auto& t = raster.transform();
    double lo_c = INFINITY, hi_c = -INFINITY, lo_r = INFINITY, hi_r = -INFINITY;
    for (const auto& corner : {WorldPoint{bb.min_x, bb.min_y}, WorldPoint{bb.min_x, bb.max_y},
                               WorldPoint{bb.max_x, bb.min_y}, WorldPoint{bb.max_x, bb.max_y}}) {
        const auto px = world_to_pixel(t, corner.x, corner.y);
        lo_c = std::min(lo_c, detail::snap_index(px.col));
        hi_c = std::max(hi_c, detail::snap_index(px.col));
        lo_r = std::min(lo_r, detail::snap_index(px.row));
        hi_r = std::max(hi_r, detail::snap_index(px.row));
    }
    const double W = static_cast<double>(raster.width());
    const double H = static_cast<double>(raster.height());
    const double c0 = std::clamp(std::floor(lo_c), 0.0, W);
    const double c1 = std::clamp(std::ceil(hi_c), 0.0, W);
    const double r0 = std::clamp(std::floor(lo_r), 0.0, H);
    const double r1 = std::clamp(std::ceil(hi_r), 0.0, H);
    if (!(c1 > c0) || !(r1 > r0))
        fail(ErrorKind::EmptyExtent, "boundary does not overlap raster extent");
    return {static_cast<std::size_t>(c0), static_cast<std::size_t>(r0),
            static_cast<std::size_t>(c1 - c0), static_cast<std::size_t>(r1 - r0)};
}

/**
 * Crop to the boundary's bounding box and set every pixel whose centre lies
 * outside the polygon to nodata. The returned transform is shifted so that
 * retained pixels keep their world coordinates.
 */
template <typename T>
BasicRaster<T> mask_clip(const BasicRaster<T>& raster, const MultiPolygon& boundary) {
    const PixelWindow w = clip_window(raster, boundary);
    const auto& src_t = raster.transform();
    const T nodata = static_cast<T>(raster.nodata());
    BasicRaster<T> out(w.cols, w.rows, src_t.shifted(static_cast<double>(w.col0), static_cast<double>(w.row0)),
                       raster.nodata(), nodata);

    if (src_t.axis_aligned()) {
        std::vector<double> xs;
        for (std::size_t rr = 0; rr < w.rows; ++rr) {
            const double yc = src_t.f + (static_cast<double>(w.row0 + rr) + 0.5) * src_t.e;
            xs.clear();
            for_each_edge(boundary, [&](const WorldPoint& p, const WorldPoint& q) {
                if ((p.y > yc) != (q.y > yc)) xs.push_back(p.x + (yc - p.y) * (q.x - p.x) / (q.y - p.y));
            });
            if (xs.empty()) continue;
            std::sort(xs.begin(), xs.end());
            const T* src = raster.row_ptr(w.row0 + rr) + w.col0;
            T* dst = out.row_ptr(rr);
            for (std::size_t cc = 0; cc < w.cols; ++cc) {
                const double xc = src_t.c + (static_cast<double>(w.col0 + cc) + 0.5) * src_t.a;
                const auto right = xs.end() - std::upper_bound(xs.begin(), xs.end(), xc);
                if (right % 2 == 1) dst[cc] = src[cc];
            }
        }
    } else {
        for (std::size_t rr = 0; rr < w.rows; ++rr)
            for (std::size_t cc = 0; cc < w.cols; ++cc) {
                const auto col = static_cast<double>(w.col0 + cc) + 0.5;
                const auto row = static_cast<double>(w.row0 + rr) + 0.5;
                if (contains(boundary, pixel_to_world(src_t, col, row)))
                    out.at(cc, rr) = raster.at(w.col0 + cc, w.row0 + rr);
            }
    }
    return out;
}

} // namespace minesite
