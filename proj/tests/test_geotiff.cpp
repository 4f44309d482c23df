#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "minesite/ascii_grid.hpp"
#include "minesite/geotiff.hpp"
#include "minesite/raster_io.hpp"
#include "test_util.hpp"

using namespace minesite;

namespace {

std::string fixture(const std::string& name) { return std::string(MINESITE_TEST_DATA_DIR) + "/" + name; }

const AffineTransform kFixtureT{30, 0, 200000, 0, -30, 600000};

// v = row * 10 + col * 0.5, the pattern written by make_tiff_fixtures.py
void expect_pattern(const Raster& r, double scale, bool truncate) {
    ASSERT_EQ(r.width(), 7u);
    ASSERT_EQ(r.height(), 5u);
    for (std::size_t row = 0; row < 5; ++row)
        for (std::size_t col = 0; col < 7; ++col) {
            double v = (row * 10.0 + col * 0.5) * scale;
            if (truncate) v = std::floor(v);
            EXPECT_EQ(r.at(col, row), static_cast<float>(v)) << col << "," << row;
        }
}

ErrorKind read_kind(const std::string& path) {
    try {
        load_raster(path);
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << path << " loaded without error";
    return ErrorKind::Invariant;
}

} // namespace

TEST(GeoTiff, LzwFloat32FromIndependentEncoder) {
    const Raster r = load_raster(fixture("lzw_float32.tif"));
    expect_pattern(r, 1.0, false);
    EXPECT_EQ(r.transform(), kFixtureT);
}

TEST(GeoTiff, LzwLargeMatchesAsciiTwin) {
    const Raster tif = load_raster(fixture("lzw_large.tif"));
    const Raster asc = read_ascii_grid_file(fixture("lzw_large.asc"));
    EXPECT_EQ(tif.width(), 200u);
    EXPECT_EQ(tif.height(), 150u);
    EXPECT_TRUE(tif.co_registered(asc, 1e-9));
    EXPECT_EQ(tif.values(), asc.values());
}

TEST(GeoTiff, DeflateUint16) {
    expect_pattern(load_raster(fixture("deflate_uint16.tif")), 2.0, true);
}

TEST(GeoTiff, PackBitsUint8) {
    expect_pattern(load_raster(fixture("packbits_uint8.tif")), 1.0, true);
}

TEST(GeoTiff, GdalNodataTag) {
    const Raster r = load_raster(fixture("raw_float32_nodata.tif"));
    EXPECT_EQ(r.nodata(), -9999.0);
    const RasterInfo info = load_raster_info(fixture("raw_float32_nodata.tif"));
    ASSERT_TRUE(info.nodata.has_value());
    EXPECT_EQ(*info.nodata, -9999.0);
}

TEST(GeoTiff, PixelIsPointShiftsHalfPixel) {
    const Raster r = load_raster(fixture("pixel_is_point.tif"));
    EXPECT_EQ(r.transform(), (AffineTransform{30, 0, 199985, 0, -30, 600015}));
}

TEST(GeoTiff, GeographicCrsRejected) { EXPECT_EQ(read_kind(fixture("geographic.tif")), ErrorKind::GeoReference); }

TEST(GeoTiff, NonMetreUnitsRejected) { EXPECT_EQ(read_kind(fixture("feet.tif")), ErrorKind::GeoReference); }

TEST(GeoTiff, MissingGeoreferenceRejected) {
    EXPECT_EQ(read_kind(fixture("no_georef.tif")), ErrorKind::GeoReference);
}

TEST(GeoTiff, GarbageFileIsIoError) {
    testutil::TempDir tmp;
    testutil::write_file(tmp / "bad.tif", "II*\0garbage");
    EXPECT_EQ(read_kind((tmp / "bad.tif").string()), ErrorKind::Io);
}

TEST(GeoTiff, WriterRoundTripRawAndDeflate) {
    testutil::TempDir tmp;
    Raster r(37, 23, AffineTransform{5, 0, 1000, 0, -5, 9000});
    for (std::size_t i = 0; i < r.size(); ++i) r.values()[i] = static_cast<float>(std::sin(i * 0.1) * 30.0);
    r.at(3, 4) = static_cast<float>(kDefaultNodata);
    r.at(5, 6) = std::nanf("");
    for (bool deflate : {false, true}) {
        geotiff::WriteOptions opt;
        opt.deflate = deflate;
        opt.rows_per_strip = 5;
        const auto p = (tmp / (deflate ? "d.tif" : "r.tif")).string();
        geotiff::write(p, r, opt);
        const Raster back = geotiff::read(p);
        EXPECT_EQ(back.transform(), r.transform());
        EXPECT_EQ(back.nodata(), r.nodata());
        ASSERT_EQ(back.size(), r.size());
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (std::isnan(r.values()[i])) EXPECT_TRUE(std::isnan(back.values()[i]));
            else EXPECT_EQ(back.values()[i], r.values()[i]);
        }
    }
}

TEST(GeoTiff, RotatedTransformUsesModelTransformation) {
    testutil::TempDir tmp;
    const AffineTransform t{25.98, 15.0, 5e5, 15.0, -25.98, 4e6};
    Raster r(4, 3, t, kDefaultNodata, 1.5f);
    const auto p = (tmp / "rot.tif").string();
    geotiff::write(p, r);
    EXPECT_EQ(geotiff::read(p).transform(), t);
}

// Header-only stand-in for the national 30 m slope raster: dimensions and
// producer statistics are read without decoding pixel data.
TEST(GeoTiff, NationalMetadataFixture) {
    testutil::TempDir tmp;
    const auto p = (tmp / "national_slope.tif").string();
    geotiff::WriteOptions opt;
    opt.sparse = true;
    opt.sparse_width = 11187;
    opt.sparse_height = 20027;
    opt.rows_per_strip = 256;
    RasterStats st;
    st.min = 0.00;
    st.max = 77.89;
    st.mean = 13.73;
    opt.stats = st;
    geotiff::write(p, Raster(1, 1, AffineTransform{30, 0, 746000, 0, -30, 2066000}), opt);

    const RasterInfo info = load_raster_info(p);
    EXPECT_EQ(info.width, 11187u);
    EXPECT_EQ(info.height, 20027u);
    EXPECT_EQ(info.width * info.height, 11187u * 20027u);
    EXPECT_EQ(info.transform.a, 30.0);
    ASSERT_TRUE(info.embedded_stats.has_value());
    EXPECT_NEAR(info.embedded_stats->min, 0.00, 0.005);
    EXPECT_NEAR(info.embedded_stats->max, 77.89, 0.005);
    EXPECT_NEAR(info.embedded_stats->mean, 13.73, 0.005);
}
