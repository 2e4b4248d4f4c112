/// @file gfl1.hpp
/// @brief GFL1 binary field snapshots.
///
/// Layout: 32-byte header (magic "GFL1", u32 nx, u32 ny, u32 ncomp,
/// 16 reserved zero bytes), all little-endian, followed by ncomp planes of
/// nx*ny row-major float64 samples. Complex data uses ncomp = 2 (re, im);
/// 3D vector fields on an n^3 grid are packed as nx = n, ny = n^2, ncomp = 3.

#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoflow::gfl1 {

struct Snapshot {
    std::uint32_t nx = 0, ny = 0, ncomp = 0;
    std::vector<double> data;  // ncomp * nx * ny values, plane after plane
};

namespace detail {

inline void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

inline void put_f64(std::string& buf, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline double get_f64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

}  // namespace detail

inline std::string encode(const Snapshot& s) {
    if (s.data.size() != static_cast<std::size_t>(s.nx) * s.ny * s.ncomp)
        throw std::invalid_argument("gfl1::encode: data size mismatch");
    std::string buf;
    buf.reserve(32 + 8 * s.data.size());
    buf += "GFL1";
    detail::put_u32(buf, s.nx);
    detail::put_u32(buf, s.ny);
    detail::put_u32(buf, s.ncomp);
    buf.append(16, '\0');  // reserved
    for (double d : s.data) detail::put_f64(buf, d);
    return buf;
}

inline Snapshot decode(const std::string& buf) {
    if (buf.size() < 32 || buf.compare(0, 4, "GFL1") != 0)
        throw std::runtime_error("gfl1::decode: bad magic");
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
    Snapshot s;
    s.nx = detail::get_u32(p + 4);
    s.ny = detail::get_u32(p + 8);
    s.ncomp = detail::get_u32(p + 12);
    const std::size_t n = static_cast<std::size_t>(s.nx) * s.ny * s.ncomp;
    if (buf.size() != 32 + 8 * n) throw std::runtime_error("gfl1::decode: truncated payload");
    s.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.data[i] = detail::get_f64(p + 32 + 8 * i);
    return s;
}

inline void write_file(const std::string& path, const Snapshot& s) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("gfl1: cannot open " + path + " for writing");
    const std::string buf = encode(s);
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!os) throw std::runtime_error("gfl1: write failed for " + path);
}

inline Snapshot read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("gfl1: cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return decode(buf);
}

}  // namespace geoflow::gfl1
