#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "affine.hpp"

namespace minesite {

using Ring = std::vector<WorldPoint>;

/// Outer ring plus holes. Rings may be closed (first == last) or open.
struct Polygon {
    Ring outer;
    std::vector<Ring> holes;
};

using MultiPolygon = std::vector<Polygon>;

struct BBox {
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();

    bool empty() const { return !(min_x <= max_x && min_y <= max_y); }

    void expand(const WorldPoint& p) {
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }

    bool contains(const BBox& o, double tol = 0.0) const {
        return o.min_x >= min_x - tol && o.max_x <= max_x + tol &&
               o.min_y >= min_y - tol && o.max_y <= max_y + tol;
    }
};

/// Axis-aligned rectangle polygon, counter-clockwise, closed.
inline Polygon rectangle(double x0, double y0, double x1, double y1) {
    const double lx = std::min(x0, x1), hx = std::max(x0, x1);
    const double ly = std::min(y0, y1), hy = std::max(y0, y1);
    return Polygon{{{lx, ly}, {hx, ly}, {hx, hy}, {lx, hy}, {lx, ly}}, {}};
}

inline double ring_signed_area(const Ring& r) {
    if (r.size() < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0, n = r.size(); i < n; ++i) {
        const auto& p = r[i];
        const auto& q = r[(i + 1) % n];
        s += p.x * q.y - q.x * p.y;
    }
    return 0.5 * s;
}

inline double area(const Polygon& p) {
    double a = std::abs(ring_signed_area(p.outer));
    for (const auto& h : p.holes) a -= std::abs(ring_signed_area(h));
    return a;
}

inline double area(const MultiPolygon& mp) {
    double a = 0.0;
    for (const auto& p : mp) a += area(p);
    return a;
}

inline BBox bounds(const MultiPolygon& mp) {
    BBox b;
    for (const auto& p : mp)
        for (const auto& v : p.outer) b.expand(v);
    return b;
}

inline BBox bounds(const Polygon& p) { return bounds(MultiPolygon{p}); }

template <typename Fn>
void for_each_edge(const MultiPolygon& mp, Fn&& fn) {
    auto ring_edges = [&](const Ring& r) {
        const std::size_t n = r.size();
        if (n < 2) return;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = r[i];
            const auto& q = r[(i + 1) % n];
            if (p.x == q.x && p.y == q.y) continue; // closing duplicate
            fn(p, q);
        }
    };
    for (const auto& poly : mp) {
        ring_edges(poly.outer);
        for (const auto& h : poly.holes) ring_edges(h);
    }
}

/// Even-odd point-in-polygon over every ring of every part.
inline bool contains(const MultiPolygon& mp, const WorldPoint& pt) {
    bool inside = false;
    for_each_edge(mp, [&](const WorldPoint& p, const WorldPoint& q) {
        if ((p.y > pt.y) != (q.y > pt.y)) {
            const double xi = p.x + (pt.y - p.y) * (q.x - p.x) / (q.y - p.y);
            if (pt.x < xi) inside = !inside;
        }
    });
    return inside;
}

namespace detail {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, false, true>; // ccw, closed
using BgMultiPolygon = bg::model::multi_polygon<BgPolygon>;

inline void append_ring(const Ring& src, BgPolygon::ring_type& dst, bool want_ccw) {
    for (const auto& p : src) dst.emplace_back(p.x, p.y);
    if (!dst.empty() && !bg::equals(dst.front(), dst.back())) dst.push_back(dst.front());
    const bool ccw = ring_signed_area(src) > 0.0;
    if (ccw != want_ccw) std::reverse(dst.begin(), dst.end());
}

inline BgMultiPolygon to_boost(const MultiPolygon& mp) {
    BgMultiPolygon out;
    for (const auto& p : mp) {
        BgPolygon bp;
        append_ring(p.outer, bp.outer(), true);
        for (const auto& h : p.holes) {
            bp.inners().emplace_back();
            append_ring(h, bp.inners().back(), false);
        }
        out.push_back(std::move(bp));
    }
    return out;
}

} // namespace detail

/// Simple (non self-intersecting) rings, holes inside shells, positive area.
/// Ring orientation is normalised before the check; nothing is repaired.
inline bool is_valid(const MultiPolygon& mp) {
    if (mp.empty()) return false;
    for (const auto& p : mp) {
        if (p.outer.size() < 3) return false;
        for (const auto& v : p.outer)
            if (!std::isfinite(v.x) || !std::isfinite(v.y)) return false;
    }
    if (!(area(mp) > 0.0)) return false;
    return boost::geometry::is_valid(detail::to_boost(mp));
}

} // namespace minesite
