#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "slbm/error.hpp"

namespace slbm {

using Vec3 = std::array<double, 3>;

//---------------------------------------------------------------------------//
// D3Q19 velocity set.
//
// Direction 0 is the rest population, 1-6 the axis neighbors and 7-18 the
// edge diagonals. Directions come in (i, i+1) opposite pairs for i odd.
//---------------------------------------------------------------------------//
struct D3Q19 {
    static constexpr int q = 19;
    static constexpr int dim = 3;
    static constexpr int center_index = 0;

    static constexpr std::array<std::array<int, 3>, q> c{{
        {0, 0, 0},
        {1, 0, 0},   {-1, 0, 0},  {0, 1, 0},   {0, -1, 0},  {0, 0, 1},   {0, 0, -1},
        {1, 1, 0},   {-1, -1, 0}, {1, -1, 0},  {-1, 1, 0},
        {1, 0, 1},   {-1, 0, -1}, {1, 0, -1},  {-1, 0, 1},
        {0, 1, 1},   {0, -1, -1}, {0, 1, -1},  {0, -1, 1},
    }};

    /// Weights as exact rationals over 36.
    static constexpr int weight_denominator = 36;
    static constexpr std::array<int, q> weight_numerator{
        12, 2, 2, 2, 2, 2, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};

    static constexpr std::array<double, q> w{
        1.0 / 3.0,
        1.0 / 18.0, 1.0 / 18.0, 1.0 / 18.0, 1.0 / 18.0, 1.0 / 18.0, 1.0 / 18.0,
        1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0,
        1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0};

    static constexpr std::array<int, q> opposite{
        0, 2, 1, 4, 3, 6, 5, 8, 7, 10, 9, 12, 11, 14, 13, 16, 15, 18, 17};

    /// Squared lattice speed of sound.
    static constexpr double cs2 = 1.0 / 3.0;
};

using VelocityModel = D3Q19;

/// Second-order equilibrium for one direction.
inline double equilibrium(int i, double rho, const Vec3& u) {
    const auto& ci = D3Q19::c[static_cast<std::size_t>(i)];
    const double cu = ci[0] * u[0] + ci[1] * u[1] + ci[2] * u[2];
    const double usq = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    return D3Q19::w[static_cast<std::size_t>(i)] * rho * (1.0 + 3.0 * cu + 4.5 * cu * cu - 1.5 * usq);
}

inline std::array<double, D3Q19::q> equilibrium(double rho, const Vec3& u) {
    std::array<double, D3Q19::q> f{};
    for (int i = 0; i < D3Q19::q; ++i)
        f[static_cast<std::size_t>(i)] = equilibrium(i, rho, u);
    return f;
}

//---------------------------------------------------------------------------//
// Geometry
//---------------------------------------------------------------------------//
enum class Cell : std::uint8_t { fluid = 0, solid = 1 };

struct Coord {
    std::int32_t x = 0;
    std::int32_t y = 0;
    std::int32_t z = 0;

    friend bool operator==(const Coord&, const Coord&) = default;
};

struct Dims {
    std::int32_t nx = 0;
    std::int32_t ny = 0;
    std::int32_t nz = 0;

    [[nodiscard]] std::size_t volume() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
    }
    friend bool operator==(const Dims&, const Dims&) = default;
};

/// Dense voxel grid of fluid/solid flags.
///
/// Flags are stored with z fastest, then y, then x. The domain is periodic
/// along x; y and z faces must be closed by solid cells.
class Geometry {
  public:
    Geometry() = default;

    Geometry(Dims dims, std::string name = {}, Cell fill = Cell::fluid)
        : dims_(dims), flags_(dims.volume(), fill), name_(std::move(name)) {
        if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1)
            throw InvalidGeometry("geometry dimensions must be positive");
    }

    Geometry(Dims dims, std::vector<Cell> flags, std::string name = {})
        : dims_(dims), flags_(std::move(flags)), name_(std::move(name)) {
        if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1)
            throw InvalidGeometry("geometry dimensions must be positive");
        if (flags_.size() != dims.volume())
            throw InvalidGeometry("flag count does not match dimensions");
    }

    [[nodiscard]] const Dims& dims() const noexcept { return dims_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    [[nodiscard]] std::size_t cell_index(std::int32_t x, std::int32_t y, std::int32_t z) const noexcept {
        return (static_cast<std::size_t>(x) * static_cast<std::size_t>(dims_.ny) + static_cast<std::size_t>(y)) *
                   static_cast<std::size_t>(dims_.nz) +
               static_cast<std::size_t>(z);
    }
    [[nodiscard]] std::size_t cell_index(const Coord& p) const noexcept { return cell_index(p.x, p.y, p.z); }

    [[nodiscard]] bool in_bounds(std::int32_t x, std::int32_t y, std::int32_t z) const noexcept {
        return x >= 0 && y >= 0 && z >= 0 && x < dims_.nx && y < dims_.ny && z < dims_.nz;
    }

    [[nodiscard]] Cell at(std::int32_t x, std::int32_t y, std::int32_t z) const { return flags_[cell_index(x, y, z)]; }
    [[nodiscard]] bool is_fluid(std::int32_t x, std::int32_t y, std::int32_t z) const {
        return flags_[cell_index(x, y, z)] == Cell::fluid;
    }
    [[nodiscard]] bool is_fluid(const Coord& p) const { return is_fluid(p.x, p.y, p.z); }

    void set(std::int32_t x, std::int32_t y, std::int32_t z, Cell v) { flags_[cell_index(x, y, z)] = v; }

    [[nodiscard]] const std::vector<Cell>& flags() const noexcept { return flags_; }

    friend bool operator==(const Geometry& a, const Geometry& b) {
        return a.dims_ == b.dims_ && a.flags_ == b.flags_;
    }

  private:
    Dims dims_{};
    std::vector<Cell> flags_;
    std::string name_;
};

inline std::size_t fluid_count(const Geometry& g) {
    return static_cast<std::size_t>(std::count(g.flags().begin(), g.flags().end(), Cell::fluid));
}

/// Empty square-duct channel: one-node solid walls on the y and z faces,
/// the x range is entirely fluid (closed periodically).
inline Geometry make_channel(std::int32_t nx, std::int32_t ny, std::int32_t nz) {
    if (nx < 3 || ny < 3 || nz < 3)
        throw InvalidGeometry("channel dimensions must be at least 3 in every direction");
    Geometry g({nx, ny, nz}, "channel", Cell::fluid);
    for (std::int32_t x = 0; x < nx; ++x)
        for (std::int32_t y = 0; y < ny; ++y)
            for (std::int32_t z = 0; z < nz; ++z)
                if (y == 0 || y == ny - 1 || z == 0 || z == nz - 1)
                    g.set(x, y, z, Cell::solid);
    return g;
}

struct FixedBedOptions {
    /// Minimum sphere center distance as a fraction of the diameter. Values
    /// below one let neighboring spheres interpenetrate, which is what allows
    /// porosities under the random-sequential-insertion jamming limit.
    double min_center_distance = 0.6;
    std::size_t max_attempts = 2'000'000;
};

struct FixedBedInfo {
    std::size_t spheres = 0;
    std::size_t attempts = 0;
    double porosity = 1.0;
};

namespace detail {
/// Portable [0,1) double from a 64-bit engine draw.
inline double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
} // namespace detail

/// Channel filled with randomly placed solid spheres of equal diameter.
///
/// Spheres are inserted one at a time until the porosity (fluid nodes over
/// the empty channel's fluid nodes) first drops to or below the target.
/// Centers lie inside the wall-bounded cross-section, wrap periodically in x
/// and respect a minimum center spacing.
inline Geometry make_fixed_bed(std::int32_t nx, std::int32_t ny, std::int32_t nz, double sphere_diameter,
                               double target_porosity, std::uint64_t seed, const FixedBedOptions& opts = {},
                               FixedBedInfo* info = nullptr) {
    if (sphere_diameter < 3.0)
        throw InvalidParameter("sphere diameter must be at least 3 nodes");
    if (!(target_porosity > 0.0 && target_porosity < 1.0))
        throw InvalidParameter("target porosity must lie in (0, 1)");
    if (!(opts.min_center_distance >= 0.0))
        throw InvalidParameter("minimum center distance must be non-negative");

    Geometry g = make_channel(nx, ny, nz);
    g.set_name("fixed-bed");
    const std::size_t channel_fluid = fluid_count(g);
    std::size_t fluid = channel_fluid;

    const double radius = 0.5 * sphere_diameter;
    const double min_dist2 = std::pow(opts.min_center_distance * sphere_diameter, 2);
    const auto span_x = static_cast<double>(nx);
    const auto span_y = static_cast<double>(ny - 2);
    const auto span_z = static_cast<double>(nz - 2);

    std::mt19937_64 rng(seed);
    std::vector<Vec3> centers;
    std::size_t attempts = 0;
    auto porosity = [&] { return static_cast<double>(fluid) / static_cast<double>(channel_fluid); };

    auto periodic_dx = [&](double a, double b) {
        double d = std::abs(a - b);
        return std::min(d, span_x - d);
    };

    while (porosity() > target_porosity) {
        if (attempts >= opts.max_attempts) {
            if (info)
                *info = {centers.size(), attempts, porosity()};
            throw PackingFailure("sphere packing did not reach the target porosity", porosity());
        }
        ++attempts;
        const Vec3 p{detail::unit_draw(rng) * span_x, 1.0 + detail::unit_draw(rng) * span_y,
                     1.0 + detail::unit_draw(rng) * span_z};
        bool clash = false;
        for (const auto& q : centers) {
            const double dx = periodic_dx(p[0], q[0]);
            const double dy = p[1] - q[1];
            const double dz = p[2] - q[2];
            if (dx * dx + dy * dy + dz * dz < min_dist2) {
                clash = true;
                break;
            }
        }
        if (clash)
            continue;
        centers.push_back(p);

        const auto r_ceil = static_cast<std::int32_t>(std::ceil(radius));
        const auto cx = static_cast<std::int32_t>(std::floor(p[0]));
        const auto cy = static_cast<std::int32_t>(std::floor(p[1]));
        const auto cz = static_cast<std::int32_t>(std::floor(p[2]));
        for (std::int32_t ix = cx - r_ceil; ix <= cx + r_ceil + 1; ++ix) {
            const std::int32_t x = ((ix % nx) + nx) % nx;
            const double dx = periodic_dx(static_cast<double>(x), p[0]);
            for (std::int32_t y = std::max(1, cy - r_ceil); y <= std::min(ny - 2, cy + r_ceil + 1); ++y) {
                const double dy = static_cast<double>(y) - p[1];
                for (std::int32_t z = std::max(1, cz - r_ceil); z <= std::min(nz - 2, cz + r_ceil + 1); ++z) {
                    const double dz = static_cast<double>(z) - p[2];
                    if (dx * dx + dy * dy + dz * dz <= radius * radius && g.is_fluid(x, y, z)) {
                        g.set(x, y, z, Cell::solid);
                        --fluid;
                    }
                }
            }
        }
    }
    if (info)
        *info = {centers.size(), attempts, porosity()};
    return g;
}

} // namespace slbm
