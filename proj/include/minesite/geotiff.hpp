#pragma once

// Minimal single-band GeoTIFF codec.
//
// Reads classic TIFF and BigTIFF, strips or tiles, uncompressed / LZW /
// Deflate / PackBits, predictors 1-3, 8..64-bit integer and float samples.
// Georeference comes from ModelTransformation or PixelScale+Tiepoint; the
// GeoKey directory is checked for a projected, metre-based model. GDAL's
// NODATA and STATISTICS_* metadata tags are honoured.
//
// The writer emits little-endian float32 strips, optionally deflated.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <zlib.h>

#include "error.hpp"
#include "raster.hpp"

namespace minesite::geotiff {

enum Tag : std::uint16_t {
    ImageWidth = 256,
    ImageLength = 257,
    BitsPerSample = 258,
    Compression = 259,
    Photometric = 262,
    StripOffsets = 273,
    SamplesPerPixel = 277,
    RowsPerStrip = 278,
    StripByteCounts = 279,
    PlanarConfig = 284,
    Predictor = 317,
    TileWidth = 322,
    TileLength = 323,
    TileOffsets = 324,
    TileByteCounts = 325,
    SampleFormat = 339,
    ModelPixelScale = 33550,
    ModelTiepoint = 33922,
    ModelTransformation = 34264,
    GeoKeyDirectory = 34735,
    GdalMetadata = 42112,
    GdalNodata = 42113,
};

enum GeoKey : std::uint16_t {
    GTModelType = 1024,
    GTRasterType = 1025,
    ProjLinearUnits = 3076,
};

inline constexpr std::uint16_t kModelProjected = 1;
inline constexpr std::uint16_t kRasterPixelIsPoint = 2;
inline constexpr std::uint16_t kLinearMeter = 9001;

namespace detail {

struct Entry {
    std::uint16_t type = 0;
    std::uint64_t count = 0;
    std::uint64_t value_field_pos = 0; // file position of the inline value/offset field
};

inline std::size_t type_size(std::uint16_t type) {
    switch (type) {
    case 1: case 2: case 6: case 7: return 1;
    case 3: case 8: return 2;
    case 4: case 9: case 11: return 4;
    case 5: case 10: case 12: case 16: case 17: return 8;
    default: return 0;
    }
}

class File {
public:
    explicit File(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) fail(ErrorKind::Io, "cannot open " + path);
        char hdr[4];
        read_raw(0, hdr, 4);
        if (hdr[0] == 'I' && hdr[1] == 'I') little_ = true;
        else if (hdr[0] == 'M' && hdr[1] == 'M') little_ = false;
        else fail(ErrorKind::Io, path + ": not a TIFF file");
        const auto magic = u16(2);
        if (magic == 42) {
            big_ = false;
            parse_ifd(u32(4));
        } else if (magic == 43) {
            big_ = true;
            if (u16(4) != 8) fail(ErrorKind::Io, path + ": unsupported BigTIFF offset size");
            parse_ifd(u64(8));
        } else {
            fail(ErrorKind::Io, path + ": not a TIFF file");
        }
    }

    const std::string& path() const { return path_; }
    bool little_endian() const { return little_; }
    bool has(std::uint16_t tag) const { return entries_.count(tag) != 0; }

    std::vector<double> numbers(std::uint16_t tag) const {
        const Entry& e = entry(tag);
        const std::size_t sz = type_size(e.type);
        if (sz == 0 || e.type == 2) fail(ErrorKind::Io, path_ + ": tag " + std::to_string(tag) + " is not numeric");
        const std::uint64_t pos = data_pos(e);
        std::vector<double> out;
        out.reserve(e.count);
        for (std::uint64_t i = 0; i < e.count; ++i) {
            const std::uint64_t p = pos + i * sz;
            switch (e.type) {
            case 1: case 7: out.push_back(u8(p)); break;
            case 6: out.push_back(static_cast<std::int8_t>(u8(p))); break;
            case 3: out.push_back(u16(p)); break;
            case 8: out.push_back(static_cast<std::int16_t>(u16(p))); break;
            case 4: out.push_back(u32(p)); break;
            case 9: out.push_back(static_cast<std::int32_t>(u32(p))); break;
            case 16: out.push_back(static_cast<double>(u64(p))); break;
            case 17: out.push_back(static_cast<double>(static_cast<std::int64_t>(u64(p)))); break;
            case 5: out.push_back(static_cast<double>(u32(p)) / u32(p + 4)); break;
            case 10: out.push_back(static_cast<double>(static_cast<std::int32_t>(u32(p))) /
                                   static_cast<std::int32_t>(u32(p + 4))); break;
            case 11: out.push_back(std::bit_cast<float>(u32(p))); break;
            case 12: out.push_back(std::bit_cast<double>(u64(p))); break;
            }
        }
        return out;
    }

    std::vector<std::uint64_t> integers(std::uint16_t tag) const {
        std::vector<std::uint64_t> out;
        const Entry& e = entry(tag);
        const std::size_t sz = type_size(e.type);
        const std::uint64_t pos = data_pos(e);
        out.reserve(e.count);
        for (std::uint64_t i = 0; i < e.count; ++i) {
            const std::uint64_t p = pos + i * sz;
            switch (e.type) {
            case 1: case 7: out.push_back(u8(p)); break;
            case 3: out.push_back(u16(p)); break;
            case 4: out.push_back(u32(p)); break;
            case 16: out.push_back(u64(p)); break;
            default: fail(ErrorKind::Io, path_ + ": tag " + std::to_string(tag) + " has non-integer type");
            }
        }
        return out;
    }

    std::uint64_t integer(std::uint16_t tag, std::uint64_t fallback) const {
        if (!has(tag)) return fallback;
        const auto v = integers(tag);
        return v.empty() ? fallback : v.front();
    }

    std::string ascii(std::uint16_t tag) const {
        const Entry& e = entry(tag);
        std::string s(e.count, '\0');
        read_raw(data_pos(e), s.data(), e.count);
        while (!s.empty() && s.back() == '\0') s.pop_back();
        return s;
    }

    std::vector<std::uint8_t> bytes(std::uint64_t offset, std::uint64_t count) const {
        std::vector<std::uint8_t> out(count);
        read_raw(offset, out.data(), count);
        return out;
    }

private:
    const Entry& entry(std::uint16_t tag) const {
        auto it = entries_.find(tag);
        if (it == entries_.end()) fail(ErrorKind::Io, path_ + ": missing TIFF tag " + std::to_string(tag));
        return it->second;
    }

    std::uint64_t data_pos(const Entry& e) const {
        const std::uint64_t total = e.count * type_size(e.type);
        const std::uint64_t inline_cap = big_ ? 8 : 4;
        if (total <= inline_cap) return e.value_field_pos;
        return big_ ? u64(e.value_field_pos) : u32(e.value_field_pos);
    }

    void parse_ifd(std::uint64_t off) {
        if (off == 0) fail(ErrorKind::Io, path_ + ": TIFF has no image directory");
        const std::uint64_t n = big_ ? u64(off) : u16(off);
        const std::uint64_t first = off + (big_ ? 8 : 2);
        const std::uint64_t step = big_ ? 20 : 12;
        for (std::uint64_t i = 0; i < n; ++i) {
            const std::uint64_t p = first + i * step;
            Entry e;
            const std::uint16_t tag = u16(p);
            e.type = u16(p + 2);
            e.count = big_ ? u64(p + 4) : u32(p + 4);
            e.value_field_pos = p + (big_ ? 12 : 8);
            if (type_size(e.type) != 0) entries_[tag] = e;
        }
    }

    void read_raw(std::uint64_t off, void* dst, std::uint64_t n) const {
        in_.clear();
        in_.seekg(static_cast<std::streamoff>(off));
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<std::uint64_t>(in_.gcount()) != n)
            fail(ErrorKind::Io, path_ + ": truncated TIFF");
    }

    template <typename U>
    U read_int(std::uint64_t off) const {
        std::array<std::uint8_t, sizeof(U)> b{};
        read_raw(off, b.data(), sizeof(U));
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            const std::size_t shift = little_ ? 8 * i : 8 * (sizeof(U) - 1 - i);
            v |= static_cast<U>(static_cast<U>(b[i]) << shift);
        }
        return v;
    }

    std::uint8_t u8(std::uint64_t off) const { return read_int<std::uint8_t>(off); }
    std::uint16_t u16(std::uint64_t off) const { return read_int<std::uint16_t>(off); }
    std::uint32_t u32(std::uint64_t off) const { return read_int<std::uint32_t>(off); }
    std::uint64_t u64(std::uint64_t off) const { return read_int<std::uint64_t>(off); }

    std::string path_;
    mutable std::ifstream in_;
    bool little_ = true;
    bool big_ = false;
    std::map<std::uint16_t, Entry> entries_;
};

inline std::vector<std::uint8_t> lzw_decode(const std::vector<std::uint8_t>& src, std::size_t expected) {
    constexpr int kClear = 256, kEoi = 257;
    std::vector<std::uint8_t> out;
    out.reserve(expected);
    std::vector<std::int32_t> prefix(4096, -1);
    std::vector<std::uint8_t> suffix(4096), first(4096);
    std::vector<std::uint16_t> length(4096, 1);
    for (int i = 0; i < 256; ++i) {
        suffix[i] = first[i] = static_cast<std::uint8_t>(i);
    }
    int width = 9, next = 258, prev = -1;
    std::uint64_t bitpos = 0;
    const std::uint64_t nbits = src.size() * 8ull;
    auto read_code = [&]() -> int {
        if (bitpos + width > nbits) return kEoi;
        int code = 0;
        for (int i = 0; i < width; ++i, ++bitpos)
            code = (code << 1) | ((src[bitpos >> 3] >> (7 - (bitpos & 7))) & 1);
        return code;
    };
    auto emit = [&](int code) {
        const std::size_t n = length[code];
        const std::size_t base = out.size();
        out.resize(base + n);
        for (std::size_t i = n; i-- > 0;) {
            out[base + i] = suffix[code];
            code = prefix[code];
        }
    };
    while (out.size() < expected) {
        const int code = read_code();
        if (code == kEoi) break;
        if (code == kClear) {
            width = 9;
            next = 258;
            prev = -1;
            continue;
        }
        if (prev < 0) {
            if (code > 255) fail(ErrorKind::Io, "corrupt LZW stream");
            emit(code);
            prev = code;
            continue;
        }
        if (code < next) {
            emit(code);
            if (next < 4096) {
                prefix[next] = prev;
                suffix[next] = first[code];
                first[next] = first[prev];
                length[next] = static_cast<std::uint16_t>(length[prev] + 1);
                ++next;
            }
        } else if (code == next && next < 4096) {
            prefix[next] = prev;
            suffix[next] = first[prev];
            first[next] = first[prev];
            length[next] = static_cast<std::uint16_t>(length[prev] + 1);
            ++next;
            emit(code);
        } else {
            fail(ErrorKind::Io, "corrupt LZW stream");
        }
        prev = code;
        if (next + 1 >= (1 << width) && width < 12) ++width;
    }
    return out;
}

inline std::vector<std::uint8_t> inflate_bytes(const std::vector<std::uint8_t>& src, std::size_t expected) {
    std::vector<std::uint8_t> out(expected);
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) fail(ErrorKind::Io, "zlib init failed");
    zs.next_in = const_cast<Bytef*>(src.data());
    zs.avail_in = static_cast<uInt>(src.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END && rc != Z_OK && rc != Z_BUF_ERROR)
        fail(ErrorKind::Io, "corrupt deflate stream");
    out.resize(out.size() - zs.avail_out);
    return out;
}

inline std::vector<std::uint8_t> deflate_bytes(const std::uint8_t* src, std::size_t n) {
    uLongf cap = compressBound(static_cast<uLong>(n));
    std::vector<std::uint8_t> out(cap);
    if (compress2(out.data(), &cap, src, static_cast<uLong>(n), 6) != Z_OK)
        fail(ErrorKind::Io, "deflate failed");
    out.resize(cap);
    return out;
}

inline std::vector<std::uint8_t> packbits_decode(const std::vector<std::uint8_t>& src, std::size_t expected) {
    std::vector<std::uint8_t> out;
    out.reserve(expected);
    std::size_t i = 0;
    while (i < src.size() && out.size() < expected) {
        const auto n = static_cast<std::int8_t>(src[i++]);
        if (n >= 0) {
            const std::size_t len = static_cast<std::size_t>(n) + 1;
            if (i + len > src.size()) fail(ErrorKind::Io, "corrupt PackBits stream");
            out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(i),
                       src.begin() + static_cast<std::ptrdiff_t>(i + len));
            i += len;
        } else if (n != -128) {
            if (i >= src.size()) fail(ErrorKind::Io, "corrupt PackBits stream");
            out.insert(out.end(), static_cast<std::size_t>(1 - n), src[i++]);
        }
    }
    return out;
}

struct SampleLayout {
    int bits = 32;
    int format = 3; // 1 uint, 2 int, 3 float
    bool file_little = true;
};

inline void swap_to_native(std::uint8_t* p, std::size_t count, int bytes, bool file_little) {
    const bool native_little = std::endian::native == std::endian::little;
    if (bytes == 1 || file_little == native_little) return;
    for (std::size_t i = 0; i < count; ++i) std::reverse(p + i * bytes, p + (i + 1) * bytes);
}

template <typename U>
void undo_horizontal(std::uint8_t* row, std::size_t n) {
    U prev{};
    for (std::size_t i = 0; i < n; ++i) {
        U v;
        std::memcpy(&v, row + i * sizeof(U), sizeof(U));
        v = static_cast<U>(v + prev);
        std::memcpy(row + i * sizeof(U), &v, sizeof(U));
        prev = v;
    }
}

/// Floating-point predictor: byte-wise delta, then planes (MSB first) to native order.
inline void undo_float_predictor(std::uint8_t* row, std::size_t n, int bytes) {
    const std::size_t total = n * static_cast<std::size_t>(bytes);
    for (std::size_t i = 1; i < total; ++i) row[i] = static_cast<std::uint8_t>(row[i] + row[i - 1]);
    std::vector<std::uint8_t> tmp(row, row + total);
    const bool native_little = std::endian::native == std::endian::little;
    for (std::size_t s = 0; s < n; ++s)
        for (int b = 0; b < bytes; ++b) {
            const int plane = native_little ? bytes - b - 1 : b;
            row[s * bytes + b] = tmp[static_cast<std::size_t>(plane) * n + s];
        }
}

inline double sample_value(const std::uint8_t* p, const SampleLayout& l) {
    switch (l.format) {
    case 3:
        if (l.bits == 32) { float f; std::memcpy(&f, p, 4); return f; }
        if (l.bits == 64) { double d; std::memcpy(&d, p, 8); return d; }
        break;
    case 2:
        switch (l.bits) {
        case 8: return static_cast<std::int8_t>(*p);
        case 16: { std::int16_t v; std::memcpy(&v, p, 2); return v; }
        case 32: { std::int32_t v; std::memcpy(&v, p, 4); return v; }
        case 64: { std::int64_t v; std::memcpy(&v, p, 8); return static_cast<double>(v); }
        }
        break;
    default:
        switch (l.bits) {
        case 8: return *p;
        case 16: { std::uint16_t v; std::memcpy(&v, p, 2); return v; }
        case 32: { std::uint32_t v; std::memcpy(&v, p, 4); return v; }
        case 64: { std::uint64_t v; std::memcpy(&v, p, 8); return static_cast<double>(v); }
        }
    }
    fail(ErrorKind::Io, "unsupported TIFF sample layout");
}

/// Decode a block (strip or tile) of `rows` x `cols` samples in place to native order.
inline void prepare_block(std::vector<std::uint8_t>& buf, std::size_t rows, std::size_t cols,
                          int predictor, const SampleLayout& l) {
    const int bytes = l.bits / 8;
    const std::size_t row_bytes = cols * static_cast<std::size_t>(bytes);
    if (buf.size() < rows * row_bytes) buf.resize(rows * row_bytes, 0);
    if (predictor == 3) {
        for (std::size_t r = 0; r < rows; ++r) undo_float_predictor(buf.data() + r * row_bytes, cols, bytes);
        return;
    }
    swap_to_native(buf.data(), rows * cols, bytes, l.file_little);
    if (predictor == 2) {
        for (std::size_t r = 0; r < rows; ++r) {
            std::uint8_t* row = buf.data() + r * row_bytes;
            switch (bytes) {
            case 1: undo_horizontal<std::uint8_t>(row, cols); break;
            case 2: undo_horizontal<std::uint16_t>(row, cols); break;
            case 4: undo_horizontal<std::uint32_t>(row, cols); break;
            case 8: undo_horizontal<std::uint64_t>(row, cols); break;
            }
        }
    }
}

inline std::vector<std::uint8_t> decompress(const File& f, int compression,
                                            std::vector<std::uint8_t> raw, std::size_t expected) {
    switch (compression) {
    case 1: return raw;
    case 5: return lzw_decode(raw, expected);
    case 8:
    case 32946: return inflate_bytes(raw, expected);
    case 32773: return packbits_decode(raw, expected);
    default:
        fail(ErrorKind::Io, f.path() + ": unsupported TIFF compression " + std::to_string(compression));
    }
}

inline std::uint16_t geokey(const File& f, std::uint16_t key, std::uint16_t fallback) {
    if (!f.has(GeoKeyDirectory)) return fallback;
    const auto dir = f.integers(GeoKeyDirectory);
    if (dir.size() < 4) return fallback;
    const std::size_t nkeys = dir[3];
    for (std::size_t i = 0; i < nkeys && 4 + 4 * i + 3 < dir.size(); ++i) {
        const std::size_t p = 4 + 4 * i;
        if (dir[p] == key && dir[p + 1] == 0) return static_cast<std::uint16_t>(dir[p + 3]);
    }
    return fallback;
}

inline RasterInfo read_info(const File& f) {
    RasterInfo info;
    info.width = f.integer(ImageWidth, 0);
    info.height = f.integer(ImageLength, 0);
    if (info.width == 0 || info.height == 0) fail(ErrorKind::Io, f.path() + ": empty TIFF image");

    if (f.has(ModelTransformation)) {
        const auto m = f.numbers(ModelTransformation);
        if (m.size() < 16) fail(ErrorKind::GeoReference, f.path() + ": malformed ModelTransformation");
        info.transform = AffineTransform{m[0], m[1], m[3], m[4], m[5], m[7]};
    } else if (f.has(ModelPixelScale) && f.has(ModelTiepoint)) {
        const auto s = f.numbers(ModelPixelScale);
        const auto tp = f.numbers(ModelTiepoint);
        if (s.size() < 2 || tp.size() < 6)
            fail(ErrorKind::GeoReference, f.path() + ": malformed tiepoint / pixel scale");
        info.transform = AffineTransform{s[0], 0.0, tp[3] - tp[0] * s[0], 0.0, -s[1], tp[4] + tp[1] * s[1]};
    } else {
        fail(ErrorKind::GeoReference, f.path() + ": GeoTIFF has no georeference tags");
    }
    if (!info.transform.invertible())
        fail(ErrorKind::GeoReference, f.path() + ": singular georeference");

    const auto model = geokey(f, GTModelType, kModelProjected);
    if (model != kModelProjected)
        fail(ErrorKind::GeoReference, f.path() + ": raster CRS is not projected");
    const auto units = geokey(f, ProjLinearUnits, kLinearMeter);
    if (units != kLinearMeter)
        fail(ErrorKind::GeoReference, f.path() + ": projected units are not metres");
    if (geokey(f, GTRasterType, 1) == kRasterPixelIsPoint)
        info.transform = info.transform.shifted(-0.5, -0.5);

    if (f.has(GdalNodata)) {
        const std::string s = f.ascii(GdalNodata);
        try {
            info.nodata = std::stod(s);
        } catch (...) {
            fail(ErrorKind::Io, f.path() + ": unparseable GDAL_NODATA '" + s + "'");
        }
    }
    if (f.has(GdalMetadata)) {
        const std::string xml = f.ascii(GdalMetadata);
        auto item = [&](const char* name) -> std::optional<double> {
            const std::regex re(std::string("<Item[^>]*name=\"") + name + "\"[^>]*>([^<]*)</Item>");
            std::smatch m;
            if (!std::regex_search(xml, m, re)) return std::nullopt;
            try {
                return std::stod(m[1].str());
            } catch (...) {
                return std::nullopt;
            }
        };
        const auto lo = item("STATISTICS_MINIMUM");
        const auto hi = item("STATISTICS_MAXIMUM");
        const auto mean = item("STATISTICS_MEAN");
        if (lo && hi && mean) {
            RasterStats st;
            st.min = *lo;
            st.max = *hi;
            st.mean = *mean;
            st.valid_count = 0;
            info.embedded_stats = st;
        }
    }
    return info;
}

} // namespace detail

inline RasterInfo read_info(const std::string& path) {
    const detail::File f(path);
    return detail::read_info(f);
}

inline Raster read(const std::string& path) {
    const detail::File f(path);
    const RasterInfo info = detail::read_info(f);

    if (f.integer(SamplesPerPixel, 1) != 1)
        fail(ErrorKind::Io, path + ": only single-band GeoTIFF is supported");
    detail::SampleLayout layout;
    layout.bits = static_cast<int>(f.integer(BitsPerSample, 1));
    layout.format = static_cast<int>(f.integer(SampleFormat, 1));
    layout.file_little = f.little_endian();
    if (layout.bits % 8 != 0 || layout.bits == 0 || layout.bits > 64)
        fail(ErrorKind::Io, path + ": unsupported bits per sample " + std::to_string(layout.bits));
    const int compression = static_cast<int>(f.integer(Compression, 1));
    const int predictor = static_cast<int>(f.integer(Predictor, 1));
    const std::size_t bytes = static_cast<std::size_t>(layout.bits / 8);
    const std::size_t W = info.width, H = info.height;
    const double nodata = info.nodata.value_or(kDefaultNodata);

    Raster r(W, H, info.transform, nodata, static_cast<float>(nodata));

    const bool tiled = f.has(TileOffsets);
    const std::size_t bw = tiled ? f.integer(TileWidth, 0) : W;
    const std::size_t bh = tiled ? f.integer(TileLength, 0) : std::min<std::size_t>(f.integer(RowsPerStrip, H), H);
    if (bw == 0 || bh == 0) fail(ErrorKind::Io, path + ": bad block geometry");
    const auto offsets = f.integers(tiled ? TileOffsets : StripOffsets);
    const auto counts = f.integers(tiled ? TileByteCounts : StripByteCounts);
    const std::size_t across = tiled ? (W + bw - 1) / bw : 1;
    const std::size_t down = (H + bh - 1) / bh;
    if (offsets.size() < across * down || counts.size() < across * down)
        fail(ErrorKind::Io, path + ": block table too short");

    for (std::size_t by = 0; by < down; ++by) {
        for (std::size_t bx = 0; bx < across; ++bx) {
            const std::size_t idx = by * across + bx;
            const std::size_t rows = tiled ? bh : std::min(bh, H - by * bh);
            if (offsets[idx] == 0 || counts[idx] == 0) continue; // sparse block
            auto buf = detail::decompress(f, compression, f.bytes(offsets[idx], counts[idx]), rows * bw * bytes);
            detail::prepare_block(buf, rows, bw, predictor, layout);
            for (std::size_t rr = 0; rr < rows; ++rr) {
                const std::size_t row = by * bh + rr;
                if (row >= H) break;
                float* dst = r.row_ptr(row);
                for (std::size_t cc = 0; cc < bw; ++cc) {
                    const std::size_t col = bx * bw + cc;
                    if (col >= W) break;
                    dst[col] = static_cast<float>(
                        detail::sample_value(buf.data() + (rr * bw + cc) * bytes, layout));
                }
            }
        }
    }
    return r;
}

struct WriteOptions {
    bool deflate = false;
    std::size_t rows_per_strip = 16;
    /// Omit pixel data entirely (all strips sparse); header and stats only.
    bool sparse = false;
    std::size_t sparse_width = 0;
    std::size_t sparse_height = 0;
    std::optional<RasterStats> stats;
};

namespace detail {

class Writer {
public:
    void add(std::uint16_t tag, std::uint16_t type, std::vector<std::uint8_t> payload, std::uint32_t count) {
        entries_[tag] = {type, count, std::move(payload)};
    }
    void shorts(std::uint16_t tag, const std::vector<std::uint16_t>& v) {
        std::vector<std::uint8_t> p;
        for (auto x : v) { p.push_back(x & 0xff); p.push_back(x >> 8); }
        add(tag, 3, std::move(p), static_cast<std::uint32_t>(v.size()));
    }
    void longs(std::uint16_t tag, const std::vector<std::uint32_t>& v) {
        std::vector<std::uint8_t> p;
        for (auto x : v)
            for (int i = 0; i < 4; ++i) p.push_back((x >> (8 * i)) & 0xff);
        add(tag, 4, std::move(p), static_cast<std::uint32_t>(v.size()));
    }
    void doubles(std::uint16_t tag, const std::vector<double>& v) {
        std::vector<std::uint8_t> p;
        for (double d : v) {
            const auto u = std::bit_cast<std::uint64_t>(d);
            for (int i = 0; i < 8; ++i) p.push_back((u >> (8 * i)) & 0xff);
        }
        add(tag, 12, std::move(p), static_cast<std::uint32_t>(v.size()));
    }
    void ascii(std::uint16_t tag, const std::string& s) {
        std::vector<std::uint8_t> p(s.begin(), s.end());
        p.push_back(0);
        add(tag, 2, p, static_cast<std::uint32_t>(p.size()));
    }

    /// Layout: header, strip data, out-of-line tag values, IFD.
    void write(const std::string& path, const std::vector<std::vector<std::uint8_t>>& blocks) {
        std::vector<std::uint8_t> out = {'I', 'I', 42, 0, 0, 0, 0, 0};
        std::vector<std::uint32_t> offs, counts;
        for (const auto& b : blocks) {
            offs.push_back(b.empty() ? 0 : static_cast<std::uint32_t>(out.size()));
            counts.push_back(static_cast<std::uint32_t>(b.size()));
            out.insert(out.end(), b.begin(), b.end());
            if (out.size() % 2) out.push_back(0);
        }
        longs(StripOffsets, offs);
        longs(StripByteCounts, counts);

        std::map<std::uint16_t, std::uint32_t> ext;
        for (auto& [tag, e] : entries_) {
            if (e.payload.size() <= 4) continue;
            ext[tag] = static_cast<std::uint32_t>(out.size());
            out.insert(out.end(), e.payload.begin(), e.payload.end());
            if (out.size() % 2) out.push_back(0);
        }
        const auto ifd = static_cast<std::uint32_t>(out.size());
        put32(out, 4, ifd);
        put16(out, static_cast<std::uint16_t>(entries_.size()));
        for (auto& [tag, e] : entries_) {
            put16(out, tag);
            put16(out, e.type);
            put32(out, e.count);
            if (e.payload.size() <= 4) {
                auto p = e.payload;
                p.resize(4, 0);
                out.insert(out.end(), p.begin(), p.end());
            } else {
                put32(out, ext[tag]);
            }
        }
        put32(out, 0);

        std::ofstream f(path, std::ios::binary);
        if (!f) fail(ErrorKind::Io, "cannot write " + path);
        f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
        if (!f) fail(ErrorKind::Io, "write failed: " + path);
    }

private:
    struct E {
        std::uint16_t type;
        std::uint32_t count;
        std::vector<std::uint8_t> payload;
    };
    static void put16(std::vector<std::uint8_t>& o, std::uint16_t v) {
        o.push_back(v & 0xff);
        o.push_back(v >> 8);
    }
    static void put32(std::vector<std::uint8_t>& o, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) o.push_back((v >> (8 * i)) & 0xff);
    }
    static void put32(std::vector<std::uint8_t>& o, std::size_t at, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) o[at + i] = (v >> (8 * i)) & 0xff;
    }
    std::map<std::uint16_t, E> entries_;
};

} // namespace detail

/// Little-endian float32 GeoTIFF, projected CRS in metres.
inline void write(const std::string& path, const Raster& r, const WriteOptions& opt = {}) {
    static_assert(std::endian::native == std::endian::little, "writer assumes little-endian host");
    const std::size_t W = opt.sparse ? opt.sparse_width : r.width();
    const std::size_t H = opt.sparse ? opt.sparse_height : r.height();
    if (W == 0 || H == 0 || W > 0xffffffffu || H > 0xffffffffu)
        fail(ErrorKind::Validation, "bad GeoTIFF dimensions");
    const std::size_t rps = std::max<std::size_t>(1, opt.rows_per_strip);

    detail::Writer w;
    w.longs(ImageWidth, {static_cast<std::uint32_t>(W)});
    w.longs(ImageLength, {static_cast<std::uint32_t>(H)});
    w.shorts(BitsPerSample, {32});
    w.shorts(Compression, {static_cast<std::uint16_t>(opt.deflate ? 8 : 1)});
    w.shorts(Photometric, {1});
    w.shorts(SamplesPerPixel, {1});
    w.longs(RowsPerStrip, {static_cast<std::uint32_t>(rps)});
    w.shorts(PlanarConfig, {1});
    w.shorts(SampleFormat, {3});

    const auto& t = r.transform();
    if (t.axis_aligned() && t.a > 0.0 && t.e < 0.0) {
        w.doubles(ModelPixelScale, {t.a, -t.e, 0.0});
        w.doubles(ModelTiepoint, {0.0, 0.0, 0.0, t.c, t.f, 0.0});
    } else {
        w.doubles(ModelTransformation,
                  {t.a, t.b, 0.0, t.c, t.d, t.e, 0.0, t.f, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
    }
    w.shorts(GeoKeyDirectory, {1, 1, 0, 3,
                               GTModelType, 0, 1, kModelProjected,
                               GTRasterType, 0, 1, 1,
                               ProjLinearUnits, 0, 1, kLinearMeter});
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", r.nodata());
        w.ascii(GdalNodata, buf);
    }
    if (opt.stats) {
        char buf[512];
        std::snprintf(buf, sizeof buf,
                      "<GDALMetadata>\n"
                      "  <Item name=\"STATISTICS_MAXIMUM\" sample=\"0\">%.17g</Item>\n"
                      "  <Item name=\"STATISTICS_MEAN\" sample=\"0\">%.17g</Item>\n"
                      "  <Item name=\"STATISTICS_MINIMUM\" sample=\"0\">%.17g</Item>\n"
                      "</GDALMetadata>",
                      opt.stats->max, opt.stats->mean, opt.stats->min);
        w.ascii(GdalMetadata, buf);
    }

    std::vector<std::vector<std::uint8_t>> blocks;
    for (std::size_t row = 0; row < H; row += rps) {
        if (opt.sparse) {
            blocks.emplace_back();
            continue;
        }
        const std::size_t rows = std::min(rps, H - row);
        const auto* p = reinterpret_cast<const std::uint8_t*>(r.row_ptr(row));
        const std::size_t n = rows * W * sizeof(float);
        if (opt.deflate) blocks.push_back(detail::deflate_bytes(p, n));
        else blocks.emplace_back(p, p + n);
    }
    w.write(path, blocks);
}

} // namespace minesite::geotiff
