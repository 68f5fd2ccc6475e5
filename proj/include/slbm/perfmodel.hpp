#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slbm/error.hpp"
#include "slbm/kernels.hpp"
#include "slbm/variant.hpp"

namespace slbm {

//---------------------------------------------------------------------------//
// Loop balance
//---------------------------------------------------------------------------//

/// Memory traffic per fluid node update, D3Q19 in double precision.
struct TrafficConstants {
    /// 19 PDFs loaded and stored at 8 B.
    static constexpr double d_pdf = 2.0 * D3Q19::q * 8.0;
    /// 18 indirect indices at 4 B; the center is always addressed directly.
    static constexpr double d_idx = (D3Q19::q - 1) * 4.0;
    /// One block-vector entry per run.
    static constexpr double d_block = 4.0;
};

struct LoopBalanceReport {
    Variant variant = Variant::os_nt;
    double bytes_per_flup = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double run_density = 0.0;
};

/// Loop balance in B/FLUP. `run_density` (runs per node) only matters for
/// the RIA variants.
inline LoopBalanceReport loop_balance(Variant v, double run_density = 0.0) {
    using T = TrafficConstants;
    if (!(run_density >= 0.0 && run_density <= 1.0))
        throw InvalidParameter("run density must lie in [0, 1]");
    LoopBalanceReport rep;
    rep.variant = v;
    rep.run_density = run_density;
    switch (v) {
    case Variant::os_nt:
        rep.bytes_per_flup = rep.lower = rep.upper = T::d_pdf + T::d_idx;
        break;
    case Variant::aa:
        rep.bytes_per_flup = rep.lower = rep.upper = T::d_pdf + T::d_idx / 2.0;
        break;
    case Variant::os_nt_r:
        rep.lower = T::d_pdf;
        rep.upper = T::d_pdf + T::d_idx + T::d_block;
        rep.bytes_per_flup = T::d_pdf + run_density * (T::d_idx + T::d_block);
        break;
    case Variant::aa_r:
    case Variant::aa_rp:
        rep.lower = T::d_pdf;
        rep.upper = T::d_pdf + (T::d_idx + T::d_block) / 2.0;
        rep.bytes_per_flup = T::d_pdf + run_density * (T::d_idx + T::d_block) / 2.0;
        break;
    }
    return rep;
}

//---------------------------------------------------------------------------//
// Machine model
//---------------------------------------------------------------------------//

enum class EcmCase { even, odd_best, odd_worst };

inline std::string to_string(EcmCase c) {
    switch (c) {
    case EcmCase::even: return "ET";
    case EcmCase::odd_best: return "OTB";
    case EcmCase::odd_worst: return "OTW";
    }
    return "?";
}

inline EcmCase parse_ecm_case(const std::string& s) {
    if (s == "ET")
        return EcmCase::even;
    if (s == "OTB")
        return EcmCase::odd_best;
    if (s == "OTW")
        return EcmCase::odd_worst;
    throw InvalidParameter("unknown ECM case \"" + s + "\"");
}

/// Streaming micro-benchmark whose bandwidth bounds a variant.
inline std::string bandwidth_pattern(Variant v) { return is_aa(v) ? "U-19A" : "CNT-19A"; }

/// Frequency-keyed table; lookups match within 1 MHz.
class FrequencyTable {
  public:
    void set(double ghz, double value) { values_[ghz] = value; }

    [[nodiscard]] std::optional<double> find(double ghz) const {
        for (const auto& [f, v] : values_)
            if (std::abs(f - ghz) < 1e-3)
                return v;
        return std::nullopt;
    }
    [[nodiscard]] const std::map<double, double>& entries() const noexcept { return values_; }

  private:
    std::map<double, double> values_;
};

struct MachineModel {
    std::string name;
    /// Cores of the modeled bandwidth domain.
    unsigned cores = 1;
    double cacheline_bytes = 64.0;
    std::vector<double> frequencies_ghz;
    /// pattern -> frequency -> GB/s
    std::map<std::string, FrequencyTable> bandwidth_gbs;
    double l1_l2_cy_per_cl = 0.0;
    double l2_l3_cy_per_cl = 0.0;
    FrequencyTable l3_mem_cy_per_cl;
    /// Pattern whose bandwidth the L3/memory transfer cost is derived from.
    std::string ecm_bandwidth_pattern = "U-19A";
    /// port -> case -> cycles per 8 node updates
    std::map<std::string, std::map<EcmCase, double>> port_cycles;

    [[nodiscard]] double bandwidth(const std::string& pattern, double ghz) const {
        const auto it = bandwidth_gbs.find(pattern);
        if (it == bandwidth_gbs.end())
            throw ModelError("machine model has no bandwidth for pattern " + pattern);
        const auto bw = it->second.find(ghz);
        if (!bw)
            throw ModelError("machine model has no " + pattern + " bandwidth at " + std::to_string(ghz) + " GHz");
        return *bw;
    }

    [[nodiscard]] double l3_mem_cost(double ghz) const {
        const auto v = l3_mem_cy_per_cl.find(ghz);
        if (!v)
            throw ModelError("machine model has no L3/memory transfer cost at " + std::to_string(ghz) + " GHz");
        return *v;
    }

    /// Throws ModelError on non-positive entries or if an L3/memory transfer
    /// cost disagrees with freq * cacheline / bandwidth by more than 5 %.
    void validate() const {
        auto positive = [](double v, const std::string& what) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw ModelError(what + " must be positive");
        };
        if (cores < 1)
            throw ModelError("core count must be positive");
        positive(cacheline_bytes, "cache line size");
        positive(l1_l2_cy_per_cl, "L1/L2 transfer cost");
        positive(l2_l3_cy_per_cl, "L2/L3 transfer cost");
        for (double f : frequencies_ghz)
            positive(f, "frequency");
        for (const auto& [pattern, table] : bandwidth_gbs)
            for (const auto& [f, bw] : table.entries())
                positive(bw, pattern + " bandwidth");
        for (const auto& [port, cases] : port_cycles)
            for (const auto& [c, cy] : cases)
                positive(cy, "port " + port + " cycles");
        for (const auto& [f, cy] : l3_mem_cy_per_cl.entries()) {
            positive(cy, "L3/memory transfer cost");
            const double expected = f * cacheline_bytes / bandwidth(ecm_bandwidth_pattern, f);
            if (std::abs(cy - expected) > 0.05 * expected)
                throw ModelError("L3/memory transfer cost at " + std::to_string(f) + " GHz is inconsistent with the " +
                                 ecm_bandwidth_pattern + " bandwidth");
        }
    }
};

namespace detail {
inline double parse_ghz(const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(key, &used);
    } catch (const std::exception&) {
        throw ModelError("invalid frequency key \"" + key + "\"");
    }
    if (used != key.size())
        throw ModelError("invalid frequency key \"" + key + "\"");
    return v;
}

inline FrequencyTable parse_frequency_table(const nlohmann::json& j) {
    FrequencyTable t;
    for (const auto& [k, v] : j.items())
        t.set(parse_ghz(k), v.get<double>());
    return t;
}
} // namespace detail

/// Reads a machine model from its JSON form:
///
///   {"name": ..., "cores": 7, "cacheline_bytes": 64,
///    "frequencies_ghz": [1.2, 2.6],
///    "bandwidths_gbs": {"CNT-19A": {"1.2": 24.0, "2.6": 24.0}, ...},
///    "transfer_cy_per_cl": {"L1L2": 1, "L2L3": 2, "L3Mem": {"1.2": 3.1, ...}},
///    "ecm_bandwidth_pattern": "U-19A",
///    "port_cycles": {"1": {"ET": 172, "OTB": 174, "OTW": 1080}, ...}}
inline MachineModel machine_from_json(const nlohmann::json& j) {
    MachineModel m;
    try {
        m.name = j.at("name").get<std::string>();
        m.cores = j.value("cores", 1u);
        m.cacheline_bytes = j.value("cacheline_bytes", 64.0);
        m.frequencies_ghz = j.at("frequencies_ghz").get<std::vector<double>>();
        for (const auto& [pattern, table] : j.at("bandwidths_gbs").items())
            m.bandwidth_gbs[pattern] = detail::parse_frequency_table(table);
        const auto& tr = j.at("transfer_cy_per_cl");
        m.l1_l2_cy_per_cl = tr.at("L1L2").get<double>();
        m.l2_l3_cy_per_cl = tr.at("L2L3").get<double>();
        m.l3_mem_cy_per_cl = detail::parse_frequency_table(tr.at("L3Mem"));
        m.ecm_bandwidth_pattern = j.value("ecm_bandwidth_pattern", std::string("U-19A"));
        for (const auto& [port, cases] : j.at("port_cycles").items())
            for (const auto& [c, cy] : cases.items())
                m.port_cycles[port][parse_ecm_case(c)] = cy.get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("malformed machine model: ") + e.what());
    } catch (const InvalidParameter& e) {
        throw ModelError(std::string("malformed machine model: ") + e.what());
    }
    m.validate();
    return m;
}

inline MachineModel load_machine_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ModelError("malformed machine model " + path.string() + ": " + e.what());
    }
    return machine_from_json(j);
}

//---------------------------------------------------------------------------//
// Roofline
//---------------------------------------------------------------------------//

/// Memory-bound performance limit in MFLUP/s for a loop balance in B/FLUP.
inline double roofline(double bandwidth_gbs, double bytes_per_flup) {
    if (!(bandwidth_gbs > 0.0))
        throw InvalidParameter("bandwidth must be positive");
    if (!(bytes_per_flup > 0.0))
        throw InvalidParameter("loop balance must be positive");
    return bandwidth_gbs * 1e3 / bytes_per_flup;
}

inline double roofline(const MachineModel& m, Variant v, double bytes_per_flup, double ghz) {
    return roofline(m.bandwidth(bandwidth_pattern(v), ghz), bytes_per_flup);
}

//---------------------------------------------------------------------------//
// ECM
//---------------------------------------------------------------------------//

/// Node updates per ECM work unit.
inline constexpr double ecm_unit_nodes = 8.0;

/// Cache lines moved per 8 node updates: 19 loaded and 19 stored, plus
/// 4.5 lines of index and block-vector data in the scalar, fully indirect
/// worst case of the odd step.
inline double ecm_cachelines(EcmCase c) {
    const double base = 2.0 * D3Q19::q;
    return c == EcmCase::odd_worst ? base + 4.5 : base;
}

struct EcmPrediction {
    EcmCase ecm_case = EcmCase::even;
    double ghz = 0.0;
    std::string binding_port;
    /// In-core execution time, cycles per 8 updates.
    double t_core = 0.0;
    double cachelines = 0.0;
    double t_l1_l2 = 0.0;
    double t_l2_l3 = 0.0;
    double t_l3_mem = 0.0;
    double t_data = 0.0;
    double t_total = 0.0;
    double single_core_mflups = 0.0;
    /// Bandwidth ceiling from the roofline with the traffic of this case.
    double roofline_mflups = 0.0;
    unsigned saturation_cores = 1;
    /// Predicted MFLUP/s for 1..cores cores.
    std::vector<double> scaling;
};

/// Single-core ECM prediction and its multicore extension.
///
/// Data transfers through the hierarchy do not overlap each other but do
/// overlap with in-core execution: t_total = max(t_core, sum of transfers).
/// Performance scales linearly with cores up to the bandwidth ceiling.
inline EcmPrediction ecm_predict(const MachineModel& m, EcmCase c, double ghz) {
    EcmPrediction p;
    p.ecm_case = c;
    p.ghz = ghz;
    for (const auto& [port, cases] : m.port_cycles) {
        const auto it = cases.find(c);
        if (it == cases.end())
            throw ModelError("port " + port + " has no cycles for case " + to_string(c));
        if (it->second > p.t_core) {
            p.t_core = it->second;
            p.binding_port = port;
        }
    }
    if (p.binding_port.empty())
        throw ModelError("machine model has no port cycle table");

    p.cachelines = ecm_cachelines(c);
    p.t_l1_l2 = p.cachelines * m.l1_l2_cy_per_cl;
    p.t_l2_l3 = p.cachelines * m.l2_l3_cy_per_cl;
    p.t_l3_mem = p.cachelines * m.l3_mem_cost(ghz);
    p.t_data = p.t_l1_l2 + p.t_l2_l3 + p.t_l3_mem;
    p.t_total = std::max(p.t_core, p.t_data);
    p.single_core_mflups = ecm_unit_nodes * ghz * 1e3 / p.t_total;
    p.saturation_cores = static_cast<unsigned>(std::ceil(p.t_total / p.t_l3_mem - 1e-12));

    const double bytes_per_flup = p.cachelines * m.cacheline_bytes / ecm_unit_nodes;
    p.roofline_mflups = roofline(m.bandwidth(m.ecm_bandwidth_pattern, ghz), bytes_per_flup);
    for (unsigned n = 1; n <= m.cores; ++n)
        p.scaling.push_back(std::min(n * p.single_core_mflups, p.roofline_mflups));
    return p;
}

/// Odd-step cycle estimate between the best and worst ECM cases, weighted by
/// the fraction of nodes on the batched path. Not part of the ECM model
/// proper; reported as an estimate only.
inline double ecm_blend_cycles(const EcmPrediction& best, const EcmPrediction& worst, double batched_fraction) {
    if (!(batched_fraction >= 0.0 && batched_fraction <= 1.0))
        throw InvalidParameter("batched fraction must lie in [0, 1]");
    return batched_fraction * best.t_total + (1.0 - batched_fraction) * worst.t_total;
}

//---------------------------------------------------------------------------//
// Energy and measured traffic
//---------------------------------------------------------------------------//

/// Normalized energy to solution in J/MFLUP.
inline double nets(double power_watts, double performance_mflups) {
    if (!(performance_mflups > 0.0))
        throw InvalidParameter("performance must be positive");
    if (power_watts < 0.0)
        throw InvalidParameter("power must be non-negative");
    return power_watts / performance_mflups;
}

struct InCacheLoopBalance {
    double even = 0.0;
    double odd = 0.0;
    double average = 0.0;
};

/// Bytes per node update derived from a run's traffic counters.
inline InCacheLoopBalance in_cache_loop_balance(const RunCounters& c) {
    auto per_flup = [](const TrafficCounters& t) {
        return t.node_updates ? static_cast<double>(t.bytes()) / static_cast<double>(t.node_updates) : 0.0;
    };
    return {per_flup(c.even), per_flup(c.odd), per_flup(c.total())};
}

} // namespace slbm
