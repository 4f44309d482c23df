#include <cmath>
#include <random>
#include <sstream>

#include <boost/geometry.hpp>
#include <gtest/gtest.h>

#include "minesite/ascii_grid.hpp"
#include "minesite/csv.hpp"
#include "minesite/mask.hpp"
#include "minesite/raster_io.hpp"
#include "test_util.hpp"

using namespace minesite;

namespace {

const AffineTransform kT30{30, 0, 200000, 0, -30, 600000};

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no minesite::Error thrown";
    return ErrorKind::Invariant;
}

Raster ramp(std::size_t w, std::size_t h, AffineTransform t) {
    Raster r(w, h, t);
    for (std::size_t row = 0; row < h; ++row)
        for (std::size_t col = 0; col < w; ++col) r.at(col, row) = static_cast<float>(row * w + col);
    return r;
}

// brute-force oracle for pixel-centre membership
bool centre_inside(const Polygon& p, const AffineTransform& t, std::size_t col, std::size_t row) {
    namespace bg = boost::geometry;
    using P = bg::model::d2::point_xy<double>;
    bg::model::polygon<P, false, true> poly;
    for (const auto& v : p.outer) bg::append(poly.outer(), P(v.x, v.y));
    bg::correct(poly);
    const auto c = pixel_to_world(t, col + 0.5, row + 0.5);
    return bg::within(P(c.x, c.y), poly);
}

} // namespace

TEST(Affine, OriginMapsToTranslation) {
    const auto p = pixel_to_world(kT30, 0, 0);
    EXPECT_EQ(p.x, 200000.0);
    EXPECT_EQ(p.y, 600000.0);
}

TEST(Affine, ForwardMatrixMultiply) {
    const auto p = pixel_to_world(kT30, 2, 1);
    EXPECT_DOUBLE_EQ(p.x, 200060.0);
    EXPECT_DOUBLE_EQ(p.y, 599970.0);
    const auto q = pixel_to_world(AffineTransform{1, 0, 0, 0, 1, 0}, 5, 7);
    EXPECT_EQ(q.x, 5.0);
    EXPECT_EQ(q.y, 7.0);
}

TEST(Affine, InverseReturnsIndices) {
    const auto px = world_to_pixel(kT30, 200060, 599970);
    EXPECT_NEAR(px.col, 2.0, 1e-12);
    EXPECT_NEAR(px.row, 1.0, 1e-12);
}

TEST(Affine, SingularTransformIsGeoReferenceError) {
    EXPECT_EQ(kind_of([] { world_to_pixel(AffineTransform{0, 0, 0, 0, 0, 0}, 1, 1); }), ErrorKind::GeoReference);
}

TEST(Affine, RoundTripRandomPoints) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ux(900000, 1100000), uy(1700000, 2100000), ua(1, 50), ub(-3, 3);
    for (int trial = 0; trial < 20; ++trial) {
        const AffineTransform t{ua(rng), ub(rng), ux(rng), ub(rng), -ua(rng), uy(rng)};
        for (int i = 0; i < 1000; ++i) {
            const double x = ux(rng), y = uy(rng);
            const auto px = world_to_pixel(t, x, y);
            const auto w = pixel_to_world(t, px.col, px.row);
            ASSERT_LT(std::abs(w.x - x), 1e-9);
            ASSERT_LT(std::abs(w.y - y), 1e-9);
        }
    }
}

TEST(Affine, DifferencesIndependentOfBasePoint) {
    const AffineTransform t{29.7, 1.3, 1e6, -0.8, -30.2, 2e6};
    const auto d0 = pixel_to_world(t, 3, 4);
    const auto d1 = pixel_to_world(t, 0, 0);
    const auto e0 = pixel_to_world(t, 103, 54);
    const auto e1 = pixel_to_world(t, 100, 50);
    EXPECT_NEAR(d0.x - d1.x, e0.x - e1.x, 1e-6);
    EXPECT_NEAR(d0.y - d1.y, e0.y - e1.y, 1e-6);
}

TEST(AsciiGrid, ConstantZeroGridStats) {
    std::istringstream in("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 30\nNODATA_value -9999\n0 0\n0 0\n");
    const Raster r = read_ascii_grid(in);
    const auto s = r.stats();
    EXPECT_EQ(s.valid_count, 4u);
    EXPECT_EQ(s.min, 0.0);
    EXPECT_EQ(s.max, 0.0);
    EXPECT_EQ(s.mean, 0.0);
}

TEST(AsciiGrid, StatsExcludeNodata) {
    std::istringstream in(
        "NCOLS 3\nNROWS 3\nXLLCORNER 100\nYLLCORNER 200\nCELLSIZE 10\nNODATA_VALUE -9999\n"
        "1 2 -9999\n4 -9999 6\n7 8 9\n");
    const Raster r = read_ascii_grid(in);
    const auto s = r.stats();
    // valid: 1 2 4 6 7 8 9
    EXPECT_EQ(s.valid_count, 7u);
    EXPECT_EQ(s.min, 1.0);
    EXPECT_EQ(s.max, 9.0);
    EXPECT_NEAR(s.mean, 37.0 / 7.0, 1e-12);
    // upper-left corner is yll + nrows * cellsize
    EXPECT_EQ(r.transform(), (AffineTransform{10, 0, 100, 0, -10, 230}));
}

TEST(AsciiGrid, CentreRegisteredHeader) {
    std::istringstream in("ncols 1\nnrows 2\nxllcenter 5\nyllcenter 5\ncellsize 10\n1\n2\n");
    const Raster r = read_ascii_grid(in);
    EXPECT_EQ(r.transform(), (AffineTransform{10, 0, 0, 0, -10, 20}));
}

TEST(AsciiGrid, MissingGeoreferenceIsGeoReferenceError) {
    EXPECT_EQ(kind_of([] {
                  std::istringstream in("ncols 1\nnrows 1\ncellsize 10\n1\n");
                  read_ascii_grid(in);
              }),
              ErrorKind::GeoReference);
}

TEST(AsciiGrid, TruncatedDataIsIoError) {
    EXPECT_EQ(kind_of([] {
                  std::istringstream in("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2 3\n");
                  read_ascii_grid(in);
              }),
              ErrorKind::Io);
}

TEST(AsciiGrid, WriteReadRoundTrip) {
    testutil::TempDir tmp;
    Raster r = ramp(5, 3, AffineTransform{30, 0, 1000, 0, -30, 5000});
    r.at(1, 1) = static_cast<float>(kDefaultNodata);
    r.at(4, 2) = 0.125f;
    const auto p = (tmp / "g.asc").string();
    save_raster(p, r);
    const Raster back = load_raster(p);
    EXPECT_EQ(back.transform(), r.transform());
    EXPECT_EQ(back.values(), r.values());
    EXPECT_TRUE(back.is_nodata(1, 1));
}

TEST(RasterIo, MissingFileIsIoError) {
    EXPECT_EQ(kind_of([] { load_raster("/nonexistent/slope.tif"); }), ErrorKind::Io);
}

TEST(Raster, NanCountsAsNodata) {
    Raster r(2, 1, AffineTransform{}, kDefaultNodata, 1.0f);
    r.at(0, 0) = std::nanf("");
    EXPECT_TRUE(r.is_nodata(0, 0));
    EXPECT_EQ(r.stats().valid_count, 1u);
}

TEST(Mask, FullExtentPolygonIsIdentity) {
    const Raster r = ramp(4, 4, kT30);
    const auto poly = rectangle(200000, 600000 - 120, 200120, 600000);
    const Raster c = mask_clip(r, {poly});
    EXPECT_EQ(c.width(), 4u);
    EXPECT_EQ(c.height(), 4u);
    EXPECT_EQ(c.values(), r.values());
    EXPECT_EQ(c.transform(), r.transform());
    const auto s0 = r.stats(), s1 = c.stats();
    EXPECT_EQ(s0.valid_count, s1.valid_count);
    EXPECT_EQ(s0.min, s1.min);
    EXPECT_EQ(s0.max, s1.max);
    EXPECT_EQ(s0.mean, s1.mean);
}

TEST(Mask, LeftHalfMasksRightHalf) {
    const Raster r = ramp(4, 4, kT30);
    // a polygon slightly wider than the left half: only centres matter
    const auto poly = rectangle(199990, 600000 - 130, 200070, 600010);
    const Raster c = mask_clip(r, {poly});
    const auto w = clip_window(r, {poly});
    ASSERT_EQ(w.col0, 0u);
    for (std::size_t row = 0; row < c.height(); ++row)
        for (std::size_t col = 0; col < c.width(); ++col) {
            const bool inside = centre_inside(poly, r.transform(), col + w.col0, row + w.row0);
            EXPECT_EQ(!c.is_nodata(col, row), inside) << col << "," << row;
            EXPECT_EQ(inside, col < 2);
        }
}

TEST(Mask, DisjointPolygonIsEmptyExtent) {
    const Raster r = ramp(4, 4, kT30);
    EXPECT_EQ(kind_of([&] { mask_clip(r, {rectangle(0, 0, 10, 10)}); }), ErrorKind::EmptyExtent);
}

TEST(Mask, RandomPolygonsMatchPointInPolygonOracle) {
    std::mt19937_64 rng(7);
    const AffineTransform t{10, 0, 5000, 0, -10, 9000};
    const Raster r = ramp(40, 30, t);
    std::uniform_real_distribution<double> ang(0, 2 * M_PI);
    for (int trial = 0; trial < 30; ++trial) {
        // star-shaped polygon around a random centre: simple by construction
        std::uniform_real_distribution<double> ucx(5050, 5350), ucy(8750, 8950), urad(20, 150);
        const double cx = ucx(rng), cy = ucy(rng);
        std::vector<double> angles(9);
        for (auto& a : angles) a = ang(rng);
        std::sort(angles.begin(), angles.end());
        Polygon p;
        for (double a : angles) {
            const double rad = urad(rng);
            p.outer.push_back({cx + rad * std::cos(a), cy + rad * std::sin(a)});
        }
        p.outer.push_back(p.outer.front());
        const Raster c = mask_clip(r, {p});
        const auto w = clip_window(r, {p});
        for (std::size_t row = 0; row < c.height(); ++row)
            for (std::size_t col = 0; col < c.width(); ++col) {
                const bool inside = centre_inside(p, t, col + w.col0, row + w.row0);
                ASSERT_EQ(!c.is_nodata(col, row), inside) << "trial " << trial;
                if (inside) {
                    ASSERT_EQ(c.at(col, row), r.at(col + w.col0, row + w.row0));
                }
            }
    }
}

TEST(Mask, RotatedGridUsesGeneralPath) {
    const AffineTransform t{8.66, 5.0, 1000, 5.0, -8.66, 2000};
    const Raster r = ramp(20, 20, t);
    Polygon p = rectangle(1000, 1850, 1150, 2050);
    const Raster c = mask_clip(r, {p});
    const auto w = clip_window(r, {p});
    std::size_t kept = 0;
    for (std::size_t row = 0; row < c.height(); ++row)
        for (std::size_t col = 0; col < c.width(); ++col) {
            const bool inside = centre_inside(p, t, col + w.col0, row + w.row0);
            ASSERT_EQ(!c.is_nodata(col, row), inside);
            kept += inside;
        }
    EXPECT_GT(kept, 0u);
}

TEST(Mask, IdempotentAndPreservesWorldCoordinates) {
    const Raster r = ramp(30, 30, kT30);
    Polygon p;
    p.outer = {{200100, 599500}, {200700, 599300}, {200800, 599900}, {200400, 599800}, {200100, 599500}};
    const Raster once = mask_clip(r, {p});
    const Raster twice = mask_clip(once, {p});
    EXPECT_EQ(once.values(), twice.values());
    EXPECT_EQ(once.transform(), twice.transform());
    const auto w = clip_window(r, {p});
    for (std::size_t row = 0; row < once.height(); ++row)
        for (std::size_t col = 0; col < once.width(); ++col) {
            if (once.is_nodata(col, row)) continue;
            const auto a = pixel_to_world(once.transform(), col, row);
            const auto b = pixel_to_world(r.transform(), col + w.col0, row + w.row0);
            EXPECT_NEAR(a.x, b.x, 1e-9);
            EXPECT_NEAR(a.y, b.y, 1e-9);
        }
}

TEST(Mask, PolygonWithHoleExcludesHole) {
    const Raster r = ramp(10, 10, AffineTransform{1, 0, 0, 0, -1, 10});
    Polygon p = rectangle(0, 0, 10, 10);
    p.holes.push_back(rectangle(3, 3, 7, 7).outer);
    const Raster c = mask_clip(r, {p});
    EXPECT_TRUE(c.is_nodata(5, 5));
    EXPECT_FALSE(c.is_nodata(1, 1));
    EXPECT_EQ(c.stats().valid_count, 100u - 16u);
}

TEST(Csv, QuotedFieldsAndLineNumbers) {
    std::istringstream in("a,b,c\r\n1,\"x,y\",\"he said \"\"hi\"\"\"\r\n2,\"multi\nline\",z\n3,,\n");
    const auto rows = csv::read(in);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[1].fields[1], "x,y");
    EXPECT_EQ(rows[1].fields[2], "he said \"hi\"");
    EXPECT_EQ(rows[2].fields[1], "multi\nline");
    EXPECT_EQ(rows[3].line, 5u);
    EXPECT_EQ(rows[3].fields.size(), 3u);
}

TEST(Csv, EscapeRoundTrip) {
    std::ostringstream out;
    csv::write_row(out, {"plain", "with,comma", "quote\"d", "line\nbreak"});
    EXPECT_EQ(out.str(), "plain,\"with,comma\",\"quote\"\"d\",\"line\nbreak\"\r\n");
    std::istringstream in(out.str());
    const auto rows = csv::read(in);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].fields, (std::vector<std::string>{"plain", "with,comma", "quote\"d", "line\nbreak"}));
}

TEST(Csv, UnterminatedQuoteIsRejected) {
    EXPECT_THROW(
        {
            std::istringstream in("a,b\n1,\"open\n");
            csv::read(in);
        },
        Error);
}
