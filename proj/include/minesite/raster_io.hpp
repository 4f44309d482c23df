#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>

#include "ascii_grid.hpp"
#include "geotiff.hpp"

namespace minesite {

enum class RasterFormat { GeoTiff, AsciiGrid };

/// Sniffs the TIFF byte-order mark; anything else is treated as ESRI ASCII.
inline RasterFormat detect_format(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open raster " + path);
    char m[4] = {};
    in.read(m, 4);
    if (in.gcount() == 4 && ((m[0] == 'I' && m[1] == 'I') || (m[0] == 'M' && m[1] == 'M')))
        return RasterFormat::GeoTiff;
    return RasterFormat::AsciiGrid;
}

inline Raster load_raster(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) fail(ErrorKind::Io, "raster not found: " + path);
    switch (detect_format(path)) {
    case RasterFormat::GeoTiff: return geotiff::read(path);
    case RasterFormat::AsciiGrid: return read_ascii_grid_file(path);
    }
    fail(ErrorKind::Io, "unsupported raster " + path);
}

/// Dimensions and georeference without decoding pixels (ASCII grids are parsed fully).
inline RasterInfo load_raster_info(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) fail(ErrorKind::Io, "raster not found: " + path);
    if (detect_format(path) == RasterFormat::GeoTiff) return geotiff::read_info(path);
    const Raster r = read_ascii_grid_file(path);
    RasterInfo info;
    info.width = r.width();
    info.height = r.height();
    info.transform = r.transform();
    info.nodata = r.nodata();
    return info;
}

/// Picks the writer from the extension (.tif/.tiff -> GeoTIFF, else ASCII grid).
inline void save_raster(const std::string& path, const Raster& r) {
    auto ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".tif" || ext == ".tiff") {
        geotiff::WriteOptions opt;
        opt.deflate = true;
        geotiff::write(path, r, opt);
    } else {
        write_ascii_grid_file(path, r);
    }
}

} // namespace minesite
