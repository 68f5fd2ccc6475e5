#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "slbm/error.hpp"
#include "slbm/lattice_model.hpp"

// Geometry file layout (all integers little-endian u32):
//
//   offset  0  magic "SLBM"
//   offset  4  format version (1)
//   offset  8  nx, ny, nz
//   offset 20  nx*ny*nz flag bytes, 0 = fluid, 1 = solid, z fastest then y then x

namespace slbm {

inline constexpr std::array<char, 4> geometry_magic{'S', 'L', 'B', 'M'};
inline constexpr std::uint32_t geometry_format_version = 1;
inline constexpr std::size_t geometry_header_bytes = 20;

namespace detail {
inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b)
        out.push_back(static_cast<std::uint8_t>((v >> (8 * b)) & 0xffu));
}

inline std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset) {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b)
        v |= static_cast<std::uint32_t>(in[offset + static_cast<std::size_t>(b)]) << (8 * b);
    return v;
}
} // namespace detail

inline std::vector<std::uint8_t> serialize_geometry(const Geometry& g) {
    std::vector<std::uint8_t> out;
    out.reserve(geometry_header_bytes + g.flags().size());
    for (char ch : geometry_magic)
        out.push_back(static_cast<std::uint8_t>(ch));
    detail::put_u32(out, geometry_format_version);
    detail::put_u32(out, static_cast<std::uint32_t>(g.dims().nx));
    detail::put_u32(out, static_cast<std::uint32_t>(g.dims().ny));
    detail::put_u32(out, static_cast<std::uint32_t>(g.dims().nz));
    for (Cell c : g.flags())
        out.push_back(static_cast<std::uint8_t>(c));
    return out;
}

inline Geometry parse_geometry(std::span<const std::uint8_t> bytes, std::string name = {}) {
    if (bytes.size() < geometry_magic.size())
        throw ParseError("truncated header: missing magic", bytes.size());
    for (std::size_t i = 0; i < geometry_magic.size(); ++i)
        if (bytes[i] != static_cast<std::uint8_t>(geometry_magic[i]))
            throw ParseError("bad magic, expected \"SLBM\"", i);
    if (bytes.size() < geometry_header_bytes)
        throw ParseError("truncated header", bytes.size());
    const std::uint32_t version = detail::get_u32(bytes, 4);
    if (version != geometry_format_version)
        throw ParseError("unsupported format version " + std::to_string(version), 4);

    const std::uint32_t dims_raw[3] = {detail::get_u32(bytes, 8), detail::get_u32(bytes, 12),
                                       detail::get_u32(bytes, 16)};
    for (int k = 0; k < 3; ++k)
        if (dims_raw[k] == 0 || dims_raw[k] > 0x7fffffffu)
            throw ParseError("invalid dimension", 8 + 4 * static_cast<std::size_t>(k));
    const Dims dims{static_cast<std::int32_t>(dims_raw[0]), static_cast<std::int32_t>(dims_raw[1]),
                    static_cast<std::int32_t>(dims_raw[2])};

    const std::size_t payload = dims.volume();
    if (bytes.size() < geometry_header_bytes + payload)
        throw ParseError("truncated payload: expected " + std::to_string(payload) + " flag bytes", bytes.size());
    if (bytes.size() > geometry_header_bytes + payload)
        throw ParseError("trailing bytes after payload", geometry_header_bytes + payload);

    std::vector<Cell> flags(payload);
    for (std::size_t k = 0; k < payload; ++k) {
        const std::uint8_t v = bytes[geometry_header_bytes + k];
        if (v > 1)
            throw ParseError("invalid flag value " + std::to_string(v), geometry_header_bytes + k);
        flags[k] = static_cast<Cell>(v);
    }
    return Geometry(dims, std::move(flags), std::move(name));
}

inline void save_geometry(const Geometry& g, const std::filesystem::path& path) {
    const auto bytes = serialize_geometry(g);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error("write to " + path.string() + " failed");
}

inline Geometry load_geometry(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_geometry(bytes, path.stem().string());
}

} // namespace slbm
