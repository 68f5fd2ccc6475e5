#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "slbm/error.hpp"
#include "slbm/lattice_model.hpp"

namespace slbm {

/// Two-relaxation-time collision parameters.
///
/// The magic parameter links the two rates:
///   magic = (1/omega_even - 1/2) * (1/omega_odd - 1/2).
struct TrtParams {
    double omega_even = 1.0;
    double omega_odd = 1.0;
    /// Body-force acceleration in lattice units.
    Vec3 body_force{0.0, 0.0, 0.0};

    static TrtParams from_magic(double omega_even, double magic, Vec3 body_force = {0.0, 0.0, 0.0}) {
        if (!(omega_even > 0.0 && omega_even < 2.0))
            throw InvalidParameter("omega_even must lie in (0, 2)");
        if (!(magic > 0.0))
            throw InvalidParameter("magic parameter must be positive");
        const double lambda_even = 1.0 / omega_even - 0.5;
        const double omega_odd = 1.0 / (magic / lambda_even + 0.5);
        TrtParams p{omega_even, omega_odd, body_force};
        p.validate();
        return p;
    }

    [[nodiscard]] double magic() const { return (1.0 / omega_even - 0.5) * (1.0 / omega_odd - 0.5); }

    /// Kinematic viscosity set by the even relaxation rate.
    [[nodiscard]] double viscosity() const { return D3Q19::cs2 * (1.0 / omega_even - 0.5); }

    void validate() const {
        if (!(omega_even > 0.0 && omega_even < 2.0))
            throw InvalidParameter("omega_even must lie in (0, 2)");
        if (!(omega_odd > 0.0 && omega_odd < 2.0))
            throw InvalidParameter("omega_odd must lie in (0, 2)");
        for (double g : body_force)
            if (!std::isfinite(g))
                throw InvalidParameter("body force must be finite");
    }
};

inline constexpr double default_magic = 0.25;

/// Precomputed per-step constants of the collision.
struct TrtCoefficients {
    double omega_even;
    double omega_odd;
    double force_even; // 1 - omega_even / 2
    double force_odd;  // 1 - omega_odd / 2
    Vec3 g;

    explicit TrtCoefficients(const TrtParams& p)
        : omega_even(p.omega_even),
          omega_odd(p.omega_odd),
          force_even(1.0 - 0.5 * p.omega_even),
          force_odd(1.0 - 0.5 * p.omega_odd),
          g(p.body_force) {}
};

/// Collides L nodes held as f[direction][lane], in place.
///
/// Every lane runs exactly the scalar arithmetic, so batched and scalar
/// updates produce bit-identical results. Forcing follows Guo's scheme split
/// into even and odd parts; the velocity includes half the force.
template <int L>
inline void collide_lanes(double (&f)[D3Q19::q][L], const TrtCoefficients& k) {
    using M = D3Q19;
    double rho[L], ux[L], uy[L], uz[L], usq[L], uf[L];
    for (int l = 0; l < L; ++l) {
        double r = 0.0;
        for (int i = 0; i < M::q; ++i)
            r += f[i][l];
        const double jx = f[1][l] - f[2][l] + f[7][l] - f[8][l] + f[9][l] - f[10][l] + f[11][l] - f[12][l] +
                          f[13][l] - f[14][l];
        const double jy = f[3][l] - f[4][l] + f[7][l] - f[8][l] - f[9][l] + f[10][l] + f[15][l] - f[16][l] +
                          f[17][l] - f[18][l];
        const double jz = f[5][l] - f[6][l] + f[11][l] - f[12][l] - f[13][l] + f[14][l] + f[15][l] - f[16][l] -
                          f[17][l] + f[18][l];
        const double inv = 1.0 / r;
        rho[l] = r;
        ux[l] = (jx + 0.5 * r * k.g[0]) * inv;
        uy[l] = (jy + 0.5 * r * k.g[1]) * inv;
        uz[l] = (jz + 0.5 * r * k.g[2]) * inv;
        usq[l] = ux[l] * ux[l] + uy[l] * uy[l] + uz[l] * uz[l];
        uf[l] = r * (ux[l] * k.g[0] + uy[l] * k.g[1] + uz[l] * k.g[2]);
    }

    for (int l = 0; l < L; ++l) {
        const double feq0 = M::w[0] * rho[l] * (1.0 - 1.5 * usq[l]);
        const double src0 = M::w[0] * (-3.0 * uf[l]);
        f[0][l] += -k.omega_even * (f[0][l] - feq0) + k.force_even * src0;
    }

    // Opposite pairs (i, i+1) for odd i.
    for (int i = 1; i < M::q; i += 2) {
        const int o = i + 1;
        const auto& ci = M::c[static_cast<std::size_t>(i)];
        const double wi = M::w[static_cast<std::size_t>(i)];
        const double cgx = ci[0] * k.g[0] + ci[1] * k.g[1] + ci[2] * k.g[2];
        for (int l = 0; l < L; ++l) {
            const double cu = ci[0] * ux[l] + ci[1] * uy[l] + ci[2] * uz[l];
            const double cf = rho[l] * cgx;
            const double eq_even = wi * rho[l] * (1.0 + 4.5 * cu * cu - 1.5 * usq[l]);
            const double eq_odd = wi * rho[l] * 3.0 * cu;
            const double src_even = wi * (9.0 * cu * cf - 3.0 * uf[l]);
            const double src_odd = wi * 3.0 * cf;
            const double fe = 0.5 * (f[i][l] + f[o][l]);
            const double fo = 0.5 * (f[i][l] - f[o][l]);
            const double de = -k.omega_even * (fe - eq_even) + k.force_even * src_even;
            const double dd = -k.omega_odd * (fo - eq_odd) + k.force_odd * src_odd;
            f[i][l] += de + dd;
            f[o][l] += de - dd;
        }
    }
}

/// Post-collision state of a single node.
inline std::array<double, D3Q19::q> trt_collide(const std::array<double, D3Q19::q>& in, const TrtParams& params) {
    const TrtCoefficients k(params);
    double f[D3Q19::q][1];
    for (int i = 0; i < D3Q19::q; ++i)
        f[i][0] = in[static_cast<std::size_t>(i)];
    collide_lanes<1>(f, k);
    std::array<double, D3Q19::q> out{};
    for (int i = 0; i < D3Q19::q; ++i)
        out[static_cast<std::size_t>(i)] = f[i][0];
    return out;
}

} // namespace slbm
