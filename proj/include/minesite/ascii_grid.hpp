#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "error.hpp"
#include "raster.hpp"

namespace minesite {

namespace detail {

inline std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    return s;
}

inline bool parse_double(std::string_view s, double& out) {
    // from_chars for double is available in libstdc++ 11
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

} // namespace detail

/// ESRI ASCII grid (NCOLS/NROWS/XLLCORNER/YLLCORNER/CELLSIZE/NODATA_VALUE).
inline Raster read_ascii_grid(std::istream& in, const std::string& source = "<stream>") {
    std::map<std::string, double> header;
    std::string key;
    std::streampos data_start = in.tellg();
    while (in >> key) {
        const std::string k = detail::upper(key);
        double v = 0.0;
        if (!detail::parse_double(key, v)) {
            std::string val;
            if (!(in >> val) || !detail::parse_double(val, v))
                fail(ErrorKind::Io, source + ": bad ASCII grid header entry '" + key + "'");
            header[k] = v;
            data_start = in.tellg();
            continue;
        }
        break; // first numeric token is data
    }
    in.clear();
    in.seekg(data_start);

    auto get = [&](const char* k) -> std::optional<double> {
        auto it = header.find(k);
        if (it == header.end()) return std::nullopt;
        return it->second;
    };
    const auto ncols = get("NCOLS");
    const auto nrows = get("NROWS");
    if (!ncols || !nrows || *ncols < 1 || *nrows < 1)
        fail(ErrorKind::Io, source + ": ASCII grid missing NCOLS/NROWS");
    const auto cell = get("CELLSIZE");
    const auto xll_corner = get("XLLCORNER");
    const auto yll_corner = get("YLLCORNER");
    const auto xll_center = get("XLLCENTER");
    const auto yll_center = get("YLLCENTER");
    if (!cell || *cell <= 0.0)
        fail(ErrorKind::GeoReference, source + ": ASCII grid missing CELLSIZE");
    if (!(xll_corner || xll_center) || !(yll_corner || yll_center))
        fail(ErrorKind::GeoReference, source + ": ASCII grid missing lower-left origin");

    const auto width = static_cast<std::size_t>(*ncols);
    const auto height = static_cast<std::size_t>(*nrows);
    const double cs = *cell;
    const double xll = xll_corner ? *xll_corner : *xll_center - 0.5 * cs;
    const double yll = yll_corner ? *yll_corner : *yll_center - 0.5 * cs;

    AffineTransform t{cs, 0.0, xll, 0.0, -cs, yll + static_cast<double>(height) * cs};
    const double nodata = get("NODATA_VALUE").value_or(kDefaultNodata);

    std::vector<float> values;
    values.reserve(width * height);
    std::string tok;
    while (values.size() < width * height && in >> tok) {
        double v = 0.0;
        if (!detail::parse_double(tok, v))
            fail(ErrorKind::Io, source + ": bad ASCII grid value '" + tok + "'");
        values.push_back(static_cast<float>(v));
    }
    if (values.size() != width * height)
        fail(ErrorKind::Io, source + ": ASCII grid truncated (" + std::to_string(values.size()) +
                                " of " + std::to_string(width * height) + " cells)");
    return Raster(width, height, t, nodata, std::move(values));
}

inline Raster read_ascii_grid_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open " + path);
    return read_ascii_grid(in, path);
}

/// Requires a north-up raster with square pixels.
inline void write_ascii_grid(std::ostream& out, const Raster& r) {
    const auto& t = r.transform();
    if (!t.axis_aligned() || t.a <= 0.0 || t.e != -t.a)
        fail(ErrorKind::GeoReference, "ASCII grid needs a north-up square-pixel transform");
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "NCOLS " << r.width() << '\n'
        << "NROWS " << r.height() << '\n'
        << "XLLCORNER " << num(t.c) << '\n'
        << "YLLCORNER " << num(t.f + static_cast<double>(r.height()) * t.e) << '\n'
        << "CELLSIZE " << num(t.a) << '\n'
        << "NODATA_VALUE " << num(r.nodata()) << '\n';
    for (std::size_t row = 0; row < r.height(); ++row) {
        for (std::size_t col = 0; col < r.width(); ++col) {
            if (col) out << ' ';
            std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(r.at(col, row)));
            out << buf;
        }
        out << '\n';
    }
}

inline void write_ascii_grid_file(const std::string& path, const Raster& r) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot write " + path);
    write_ascii_grid(out, r);
    if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

} // namespace minesite
