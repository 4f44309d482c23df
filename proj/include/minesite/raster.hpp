#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "affine.hpp"
#include "error.hpp"

namespace minesite {

inline constexpr double kDefaultNodata = -9999.0;

struct RasterStats {
    std::size_t valid_count = 0;
    double min = std::numeric_limits<double>::quiet_NaN();
    double max = std::numeric_limits<double>::quiet_NaN();
    double mean = std::numeric_limits<double>::quiet_NaN();
};

/**
 * Row-major single-band grid with georeference.
 *
 * A cell is nodata when it equals the sentinel or is NaN. Slope rasters hold
 * degrees in [0, 90); land-use rasters hold integral category codes.
 */
template <typename T>
class BasicRaster {
public:
    using value_type = T;

    BasicRaster() = default;

    BasicRaster(std::size_t width, std::size_t height, AffineTransform transform,
                double nodata = kDefaultNodata, T fill = T{})
        : width_(width), height_(height), transform_(transform), nodata_(nodata),
          values_(width * height, fill) {}

    BasicRaster(std::size_t width, std::size_t height, AffineTransform transform,
                double nodata, std::vector<T> values)
        : width_(width), height_(height), transform_(transform), nodata_(nodata),
          values_(std::move(values)) {
        if (values_.size() != width_ * height_)
            fail(ErrorKind::Validation, "raster value count does not match dimensions");
    }

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    std::size_t size() const { return values_.size(); }
    const AffineTransform& transform() const { return transform_; }
    double nodata() const { return nodata_; }

    /// Pixel size along x, meters.
    double resolution() const { return std::hypot(transform_.a, transform_.d); }
    double resolution_y() const { return std::hypot(transform_.b, transform_.e); }

    T& at(std::size_t col, std::size_t row) { return values_[row * width_ + col]; }
    const T& at(std::size_t col, std::size_t row) const { return values_[row * width_ + col]; }

    const T* row_ptr(std::size_t row) const { return values_.data() + row * width_; }
    T* row_ptr(std::size_t row) { return values_.data() + row * width_; }

    const std::vector<T>& values() const { return values_; }
    std::vector<T>& values() { return values_; }

    bool is_nodata(T v) const {
        if constexpr (std::numeric_limits<T>::has_quiet_NaN) {
            if (std::isnan(v)) return true;
        }
        return static_cast<double>(v) == nodata_;
    }

    bool is_nodata(std::size_t col, std::size_t row) const { return is_nodata(at(col, row)); }

    RasterStats stats() const {
        RasterStats s;
        long double sum = 0.0L;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const T v : values_) {
            if (is_nodata(v)) continue;
            const double x = static_cast<double>(v);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            sum += x;
            ++s.valid_count;
        }
        if (s.valid_count > 0) {
            s.min = lo;
            s.max = hi;
            s.mean = static_cast<double>(sum / static_cast<long double>(s.valid_count));
        }
        return s;
    }

    /// Same grid geometry (dims and transform within tol).
    bool co_registered(const auto& other, double tol = 1e-6) const {
        return width_ == other.width() && height_ == other.height() &&
               transform_.approx_equal(other.transform(), tol);
    }

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    AffineTransform transform_{};
    double nodata_ = kDefaultNodata;
    std::vector<T> values_;
};

using Raster = BasicRaster<float>;

/// Header-level description, readable without decoding pixel data.
struct RasterInfo {
    std::size_t width = 0;
    std::size_t height = 0;
    AffineTransform transform{};
    std::optional<double> nodata;
    /// Statistics embedded by the producer (GDAL metadata), if any.
    std::optional<RasterStats> embedded_stats;
};

} // namespace minesite
