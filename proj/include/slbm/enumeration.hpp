#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "slbm/error.hpp"
#include "slbm/lattice_model.hpp"

namespace slbm {

enum class OrderMethod { lexicographic, hilbert };

inline constexpr std::uint32_t no_rank = std::numeric_limits<std::uint32_t>::max();

/// Visit order of the fluid nodes of a geometry (an enumeration function).
struct Ordering {
    std::vector<Coord> nodes;
    /// Dense over all cells of the source geometry; `no_rank` for solids.
    std::vector<std::uint32_t> inverse;
    Dims dims{};
    OrderMethod method = OrderMethod::lexicographic;
    std::int32_t blocking = 1;
    bool renumbered = false;

    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }

    [[nodiscard]] std::uint32_t rank_of(const Coord& p) const {
        return inverse[(static_cast<std::size_t>(p.x) * static_cast<std::size_t>(dims.ny) +
                        static_cast<std::size_t>(p.y)) *
                           static_cast<std::size_t>(dims.nz) +
                       static_cast<std::size_t>(p.z)];
    }

    [[nodiscard]] std::string label() const {
        std::string s = method == OrderMethod::hilbert ? std::string("hilbert")
                                                       : "ls:" + std::to_string(blocking);
        if (renumbered)
            s += "+renumber";
        return s;
    }
};

namespace detail {

inline void rebuild_inverse(Ordering& o) {
    o.inverse.assign(o.dims.volume(), no_rank);
    for (std::size_t k = 0; k < o.nodes.size(); ++k) {
        const auto& p = o.nodes[k];
        o.inverse[(static_cast<std::size_t>(p.x) * static_cast<std::size_t>(o.dims.ny) +
                   static_cast<std::size_t>(p.y)) *
                      static_cast<std::size_t>(o.dims.nz) +
                  static_cast<std::size_t>(p.z)] = static_cast<std::uint32_t>(k);
    }
}

/// Sort fluid nodes by a 64-bit key; keys must be injective.
template <class KeyFn>
Ordering order_by_key(const Geometry& g, KeyFn key) {
    const auto& d = g.dims();
    std::vector<std::pair<std::uint64_t, Coord>> keyed;
    keyed.reserve(fluid_count(g));
    for (std::int32_t x = 0; x < d.nx; ++x)
        for (std::int32_t y = 0; y < d.ny; ++y)
            for (std::int32_t z = 0; z < d.nz; ++z)
                if (g.is_fluid(x, y, z))
                    keyed.emplace_back(key(x, y, z), Coord{x, y, z});
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    if (keyed.size() >= no_rank)
        throw InvalidGeometry("too many fluid nodes for 32-bit ranks");
    Ordering o;
    o.dims = d;
    o.nodes.reserve(keyed.size());
    for (const auto& [k, p] : keyed)
        o.nodes.push_back(p);
    rebuild_inverse(o);
    return o;
}

/// Hilbert index of a point in a 2^bits cube (Skilling's transpose algorithm).
inline std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y, std::uint32_t z, int bits) {
    std::uint32_t X[3] = {x, y, z};
    const std::uint32_t top = 1u << (bits - 1);

    // Inverse undo of the excess work.
    for (std::uint32_t q = top; q > 1; q >>= 1) {
        const std::uint32_t p = q - 1;
        for (auto& xi : X) {
            if (xi & q) {
                X[0] ^= p;
            } else {
                const std::uint32_t t = (X[0] ^ xi) & p;
                X[0] ^= t;
                xi ^= t;
            }
        }
    }
    // Gray encode.
    X[1] ^= X[0];
    X[2] ^= X[1];
    std::uint32_t t = 0;
    for (std::uint32_t q = top; q > 1; q >>= 1)
        if (X[2] & q)
            t ^= q - 1;
    for (auto& xi : X)
        xi ^= t;

    // Interleave the transposed form, X[0] most significant.
    std::uint64_t h = 0;
    for (int b = bits - 1; b >= 0; --b)
        for (const auto xi : X)
            h = (h << 1) | ((xi >> b) & 1u);
    return h;
}

} // namespace detail

/// Lexicographic sorting with blocking factor `blocking`.
///
/// Nodes are grouped into blocking^3 cubes visited in (x,y,z) order, and
/// visited in (x,y,z) order inside each cube. With blocking = 1 this is the
/// plain (x,y,z) order with z running fastest.
inline Ordering order_lexicographic(const Geometry& g, std::int32_t blocking) {
    if (blocking < 1)
        throw InvalidParameter("blocking factor must be at least 1");
    const auto& d = g.dims();
    const auto B = static_cast<std::uint64_t>(blocking);
    const auto nby = static_cast<std::uint64_t>((d.ny + blocking - 1) / blocking);
    const auto nbz = static_cast<std::uint64_t>((d.nz + blocking - 1) / blocking);
    auto o = detail::order_by_key(g, [&](std::int32_t x, std::int32_t y, std::int32_t z) {
        const auto ux = static_cast<std::uint64_t>(x);
        const auto uy = static_cast<std::uint64_t>(y);
        const auto uz = static_cast<std::uint64_t>(z);
        const std::uint64_t block = ((ux / B) * nby + uy / B) * nbz + uz / B;
        const std::uint64_t inner = ((ux % B) * B + uy % B) * B + uz % B;
        return block * B * B * B + inner;
    });
    o.method = OrderMethod::lexicographic;
    o.blocking = blocking;
    return o;
}

/// Fluid nodes in the visit order of a 3-D Hilbert curve over the smallest
/// enclosing power-of-two cube.
inline Ordering order_hilbert(const Geometry& g) {
    const auto& d = g.dims();
    const std::int32_t extent = std::max({d.nx, d.ny, d.nz});
    int bits = 1;
    while ((std::int64_t{1} << bits) < extent)
        ++bits;
    if (bits > 21)
        throw InvalidGeometry("domain too large for a 64-bit Hilbert index");
    auto o = detail::order_by_key(g, [&](std::int32_t x, std::int32_t y, std::int32_t z) {
        return detail::hilbert_index(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y),
                                     static_cast<std::uint32_t>(z), bits);
    });
    o.method = OrderMethod::hilbert;
    o.blocking = 1;
    return o;
}

/// Throws unless `bounds` are strictly increasing offsets from 0 to `n`.
inline void validate_chunk_bounds(std::span<const std::size_t> bounds, std::size_t n) {
    if (bounds.size() < 2)
        throw InvalidPartition("chunk bounds need at least two offsets");
    if (bounds.front() != 0 || bounds.back() != n)
        throw InvalidPartition("chunk bounds must cover [0, " + std::to_string(n) + ")");
    for (std::size_t k = 1; k < bounds.size(); ++k)
        if (bounds[k] <= bounds[k - 1])
            throw InvalidPartition("chunk bounds must be strictly increasing");
}

/// Re-sorts every chunk by plain (x,y,z) order; chunk membership is kept.
inline Ordering renumber_within_chunks(const Ordering& ordering, std::span<const std::size_t> chunk_bounds) {
    validate_chunk_bounds(chunk_bounds, ordering.size());
    Ordering out = ordering;
    auto less = [](const Coord& a, const Coord& b) {
        if (a.x != b.x)
            return a.x < b.x;
        if (a.y != b.y)
            return a.y < b.y;
        return a.z < b.z;
    };
    for (std::size_t k = 0; k + 1 < chunk_bounds.size(); ++k)
        std::sort(out.nodes.begin() + static_cast<std::ptrdiff_t>(chunk_bounds[k]),
                  out.nodes.begin() + static_cast<std::ptrdiff_t>(chunk_bounds[k + 1]), less);
    out.renumbered = true;
    detail::rebuild_inverse(out);
    return out;
}

/// Parses "ls:B", "ls" (B = 1) or "hilbert".
struct OrderSpec {
    OrderMethod method = OrderMethod::lexicographic;
    std::int32_t blocking = 1;
};

inline OrderSpec parse_order(const std::string& s) {
    if (s == "hilbert")
        return {OrderMethod::hilbert, 1};
    if (s == "ls")
        return {OrderMethod::lexicographic, 1};
    if (s.rfind("ls:", 0) == 0) {
        const std::string num = s.substr(3);
        std::size_t used = 0;
        long b = 0;
        try {
            b = std::stol(num, &used);
        } catch (const std::exception&) {
            throw InvalidParameter("invalid blocking factor in order \"" + s + "\"");
        }
        if (used != num.size() || b < 1 || b > std::numeric_limits<std::int32_t>::max())
            throw InvalidParameter("invalid blocking factor in order \"" + s + "\"");
        return {OrderMethod::lexicographic, static_cast<std::int32_t>(b)};
    }
    throw InvalidParameter("unknown order \"" + s + "\" (expected ls:B or hilbert)");
}

inline Ordering make_ordering(const Geometry& g, const OrderSpec& spec) {
    return spec.method == OrderMethod::hilbert ? order_hilbert(g) : order_lexicographic(g, spec.blocking);
}

} // namespace slbm
