#pragma once

#include <cmath>
#include <utility>

#include "error.hpp"

namespace minesite {

struct WorldPoint {
    double x = 0.0;
    double y = 0.0;
};

struct PixelPoint {
    double col = 0.0;
    double row = 0.0;
};

/**
 * Six-coefficient affine georeference.
 *
 *   x = c + col*a + row*b
 *   y = f + col*d + row*e
 *
 * (col, row) = (0, 0) is the upper-left corner of the upper-left pixel.
 * North-up rasters have b = d = 0, a > 0 and e < 0.
 */
struct AffineTransform {
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double e = -1.0;
    double f = 0.0;

    double determinant() const { return a * e - b * d; }
    bool invertible() const { return determinant() != 0.0; }
    bool axis_aligned() const { return b == 0.0 && d == 0.0; }

    /// Transform of the sub-grid starting at (col, row) of this one.
    AffineTransform shifted(double col, double row) const {
        AffineTransform t = *this;
        t.c = c + col * a + row * b;
        t.f = f + col * d + row * e;
        return t;
    }

    bool approx_equal(const AffineTransform& o, double tol) const {
        return std::abs(a - o.a) <= tol && std::abs(b - o.b) <= tol &&
               std::abs(c - o.c) <= tol && std::abs(d - o.d) <= tol &&
               std::abs(e - o.e) <= tol && std::abs(f - o.f) <= tol;
    }

    friend bool operator==(const AffineTransform&, const AffineTransform&) = default;
};

/// World coordinate of pixel corner (col, row). Indices may be fractional.
inline WorldPoint pixel_to_world(const AffineTransform& t, double col, double row) {
    return {t.c + col * t.a + row * t.b, t.f + col * t.d + row * t.e};
}

inline PixelPoint world_to_pixel(const AffineTransform& t, double x, double y) {
    const double det = t.determinant();
    if (det == 0.0 || !std::isfinite(det))
        fail(ErrorKind::GeoReference, "singular affine transform");
    const double dx = x - t.c;
    const double dy = y - t.f;
    return {(dx * t.e - dy * t.b) / det, (dy * t.a - dx * t.d) / det};
}

} // namespace minesite
