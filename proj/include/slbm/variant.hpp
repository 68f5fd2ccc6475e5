#pragma once

#include <array>
#include <string>
#include <string_view>

#include "slbm/error.hpp"

namespace slbm {

/// Propagation step implementations.
enum class Variant {
    os_nt,   // two grids, pull, indirect
    os_nt_r, // os_nt with reduced indirect addressing
    aa,      // single grid, AA pattern
    aa_r,    // aa with reduced indirect addressing in the odd step
    aa_rp,   // aa_r with batched (partially vectorized) odd step
};

inline constexpr std::array<Variant, 5> all_variants{Variant::os_nt, Variant::os_nt_r, Variant::aa, Variant::aa_r,
                                                     Variant::aa_rp};

inline constexpr std::string_view to_string(Variant v) {
    switch (v) {
    case Variant::os_nt: return "os-nt";
    case Variant::os_nt_r: return "os-nt-r";
    case Variant::aa: return "aa";
    case Variant::aa_r: return "aa-r";
    case Variant::aa_rp: return "aa-rp";
    }
    return "?";
}

inline Variant parse_variant(std::string_view s) {
    for (Variant v : all_variants)
        if (to_string(v) == s)
            return v;
    throw InvalidParameter("unknown variant \"" + std::string(s) + "\"");
}

inline constexpr bool is_aa(Variant v) { return v == Variant::aa || v == Variant::aa_r || v == Variant::aa_rp; }
inline constexpr bool uses_ria(Variant v) { return v == Variant::os_nt_r || v == Variant::aa_r || v == Variant::aa_rp; }

} // namespace slbm
