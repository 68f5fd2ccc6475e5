#include <gtest/gtest.h>

#include "slbm/partition.hpp"
#include "slbm/perfmodel.hpp"

using namespace slbm;

namespace {

MachineModel haswell() { return load_machine_model(SLBM_DATA_DIR "/haswell-e5-2697v3.json"); }

nlohmann::json haswell_json() {
    std::ifstream in(SLBM_DATA_DIR "/haswell-e5-2697v3.json");
    return nlohmann::json::parse(in);
}

} // namespace

TEST(LoopBalance, Constants) {
    EXPECT_EQ(TrafficConstants::d_pdf, 304.0);
    EXPECT_EQ(TrafficConstants::d_idx, 72.0);
    EXPECT_EQ(TrafficConstants::d_block, 4.0);
}

TEST(LoopBalance, FixedVariants) {
    EXPECT_EQ(loop_balance(Variant::os_nt).bytes_per_flup, 376.0);
    EXPECT_EQ(loop_balance(Variant::aa).bytes_per_flup, 340.0);
    EXPECT_EQ(loop_balance(Variant::os_nt, 0.7).bytes_per_flup, 376.0);
}

TEST(LoopBalance, RiaBounds) {
    EXPECT_EQ(loop_balance(Variant::os_nt_r, 1.0).bytes_per_flup, 380.0);
    EXPECT_EQ(loop_balance(Variant::os_nt_r, 0.0).bytes_per_flup, 304.0);
    EXPECT_EQ(loop_balance(Variant::aa_r, 0.0).bytes_per_flup, 304.0);
    EXPECT_EQ(loop_balance(Variant::aa_r, 1.0).bytes_per_flup, 342.0);
    EXPECT_EQ(loop_balance(Variant::aa_rp, 1.0).bytes_per_flup, 342.0);
    const auto r = loop_balance(Variant::os_nt_r, 0.5);
    EXPECT_EQ(r.lower, 304.0);
    EXPECT_EQ(r.upper, 380.0);
    EXPECT_EQ(loop_balance(Variant::aa_r, 0.5).upper, 342.0);
}

TEST(LoopBalance, MonotoneInRunDensity) {
    for (Variant v : all_variants) {
        double prev = -1;
        for (int k = 0; k <= 100; ++k) {
            const double b = loop_balance(v, k / 100.0).bytes_per_flup;
            EXPECT_GE(b, prev);
            prev = b;
        }
    }
    EXPECT_THROW(loop_balance(Variant::aa_r, -0.1), InvalidParameter);
    EXPECT_THROW(loop_balance(Variant::aa_r, 1.5), InvalidParameter);
}

TEST(LoopBalance, ChannelFromBlockVector) {
    // Only the cross-section matters for the per-row run pattern.
    const auto g = make_channel(4, 100, 100);
    const auto lat = build_lattice(g, order_lexicographic(g, 1));
    const double r = ria_stats(lat.blocks, 1).run_density;
    EXPECT_NEAR(r, 3.0 / 98.0, 1e-15);
    EXPECT_NEAR(loop_balance(Variant::os_nt_r, r).bytes_per_flup, 306.0, 1.0);
    EXPECT_NEAR(loop_balance(Variant::aa_r, r).bytes_per_flup, 305.0, 1.0);
}

TEST(MachineModel, ShippedHaswellLoads) {
    const auto m = haswell();
    EXPECT_EQ(m.cores, 7u);
    EXPECT_EQ(m.frequencies_ghz, (std::vector<double>{1.2, 2.6}));
    EXPECT_EQ(m.bandwidth("CNT-19A", 2.6), 24.0);
    EXPECT_EQ(m.bandwidth("U-19A", 1.2), 24.8);
    EXPECT_EQ(m.bandwidth("U-19A", 2.6), 25.1);
    EXPECT_EQ(m.bandwidth("CNT-1A", 1.2), 27.2);
    EXPECT_EQ(m.l3_mem_cost(2.6), 6.6);
    EXPECT_THROW((void)m.bandwidth("U-19A", 3.0), ModelError);
    EXPECT_THROW((void)m.bandwidth("STREAM", 2.6), ModelError);
    EXPECT_THROW((void)m.l3_mem_cost(1.9), ModelError);
}

TEST(MachineModel, InconsistentMemoryCostIsRejected) {
    auto j = haswell_json();
    j["transfer_cy_per_cl"]["L3Mem"]["2.6"] = 8.0;
    EXPECT_THROW(machine_from_json(j), ModelError);
    j = haswell_json();
    j["bandwidths_gbs"]["CNT-19A"]["1.2"] = 0.0;
    EXPECT_THROW(machine_from_json(j), ModelError);
    j = haswell_json();
    j.erase("port_cycles");
    EXPECT_THROW(machine_from_json(j), ModelError);
    j = haswell_json();
    j["port_cycles"]["0"]["XT"] = 1;
    EXPECT_THROW(machine_from_json(j), ModelError);
    j = haswell_json();
    j["bandwidths_gbs"]["U-1A"] = {{"fast", 3.0}};
    EXPECT_THROW(machine_from_json(j), ModelError);
}

TEST(Roofline, TableCellsWithinRounding) {
    const auto m = haswell();
    struct Cell {
        Variant v;
        double b_l, ghz, expected;
    };
    // Loop balances and MFLUP/s as published for the two benchmark geometries.
    const Cell cells[] = {
        {Variant::os_nt, 376, 1.2, 63.8},   {Variant::os_nt_r, 306, 1.2, 78.4}, {Variant::aa, 340, 1.2, 72.9},
        {Variant::aa_r, 305, 1.2, 81.3},    {Variant::os_nt, 376, 2.6, 63.8},   {Variant::os_nt_r, 306, 2.6, 78.4},
        {Variant::aa, 340, 2.6, 73.8},      {Variant::aa_r, 305, 2.6, 82.2},    {Variant::os_nt_r, 333, 1.2, 72.0},
        {Variant::aa_r, 319, 1.2, 77.8},    {Variant::os_nt_r, 333, 2.6, 72.0}, {Variant::aa_r, 319, 2.6, 78.8},
    };
    for (const auto& c : cells)
        EXPECT_NEAR(roofline(m, c.v, c.b_l, c.ghz), c.expected, 0.005 * c.expected)
            << to_string(c.v) << " @" << c.ghz;
}

TEST(Roofline, Units) {
    EXPECT_DOUBLE_EQ(roofline(24.0, 376.0), 24.0e3 / 376.0);
    EXPECT_DOUBLE_EQ(roofline(300.0, 300.0), 1000.0); // 1 FLUP/ns
    EXPECT_NEAR(roofline(25.1, 305.0), 82.3, 0.05);
    EXPECT_THROW(roofline(0.0, 376.0), InvalidParameter);
    EXPECT_THROW(roofline(24.0, 0.0), InvalidParameter);
}

TEST(Ecm, CoreTimeIsColumnMaximum) {
    const auto m = haswell();
    EXPECT_EQ(ecm_predict(m, EcmCase::even, 2.6).t_core, 172.0);
    EXPECT_EQ(ecm_predict(m, EcmCase::odd_best, 2.6).t_core, 174.0);
    EXPECT_EQ(ecm_predict(m, EcmCase::odd_worst, 2.6).t_core, 1080.0);
    EXPECT_EQ(ecm_predict(m, EcmCase::even, 2.6).binding_port, "1");
}

TEST(Ecm, DataTransferArithmetic) {
    const auto m = haswell();
    const auto et = ecm_predict(m, EcmCase::even, 2.6);
    EXPECT_EQ(et.cachelines, 38.0);
    EXPECT_NEAR(et.t_data, 38.0 * (1 + 2 + 6.6), 1e-12);
    EXPECT_NEAR(et.t_data, 364.8, 1e-12);
    EXPECT_NEAR(et.t_total, 364.8, 1e-12);
    EXPECT_NEAR(et.single_core_mflups, 8 * 2600.0 / 364.8, 1e-9);
    EXPECT_EQ(et.saturation_cores, 2u);

    const auto otw = ecm_predict(m, EcmCase::odd_worst, 2.6);
    EXPECT_EQ(otw.cachelines, 42.5);
    // 8 nodes x (8 x 4 B + 4 B) = 288 B = 4.5 lines of 64 B
    EXPECT_EQ(otw.cachelines - et.cachelines, 8.0 * (8 * 4 + 4) / 64.0);
    EXPECT_EQ(otw.t_total, 1080.0);

    const auto low = ecm_predict(m, EcmCase::even, 1.2);
    EXPECT_NEAR(low.t_data, 38.0 * 6.1, 1e-12);
}

TEST(Ecm, OrderingAndSaturation) {
    const auto m = haswell();
    for (double f : m.frequencies_ghz) {
        const auto et = ecm_predict(m, EcmCase::even, f);
        const auto otb = ecm_predict(m, EcmCase::odd_best, f);
        const auto otw = ecm_predict(m, EcmCase::odd_worst, f);
        EXPECT_LE(et.t_total, otb.t_total);
        EXPECT_LE(otb.t_total, otw.t_total);
        for (const auto& p : {et, otb, otw}) {
            EXPECT_GE(p.saturation_cores, 1u);
            ASSERT_EQ(p.scaling.size(), 7u);
            for (std::size_t n = 1; n < p.scaling.size(); ++n)
                EXPECT_GE(p.scaling[n], p.scaling[n - 1]);
            EXPECT_LE(p.scaling.back(), p.roofline_mflups + 1e-9);
            EXPECT_DOUBLE_EQ(p.scaling.front(), std::min(p.single_core_mflups, p.roofline_mflups));
        }
    }
    EXPECT_LE(ecm_predict(m, EcmCase::even, 2.6).saturation_cores, 7u);
}

TEST(Ecm, MissingPortDataIsAnError) {
    auto m = haswell();
    m.port_cycles["5"] = {{EcmCase::even, 10}};
    EXPECT_THROW(ecm_predict(m, EcmCase::odd_best, 2.6), ModelError);
    m.port_cycles.clear();
    EXPECT_THROW(ecm_predict(m, EcmCase::even, 2.6), ModelError);
}

TEST(Ecm, BlendIsBetweenCases) {
    const auto m = haswell();
    const auto b = ecm_predict(m, EcmCase::odd_best, 2.6), w = ecm_predict(m, EcmCase::odd_worst, 2.6);
    EXPECT_EQ(ecm_blend_cycles(b, w, 1.0), b.t_total);
    EXPECT_EQ(ecm_blend_cycles(b, w, 0.0), w.t_total);
    EXPECT_NEAR(ecm_blend_cycles(b, w, 0.5), 0.5 * (b.t_total + w.t_total), 1e-12);
    EXPECT_THROW(ecm_blend_cycles(b, w, 1.1), InvalidParameter);
}

TEST(Ecm, CaseNames) {
    for (EcmCase c : {EcmCase::even, EcmCase::odd_best, EcmCase::odd_worst})
        EXPECT_EQ(parse_ecm_case(to_string(c)), c);
    EXPECT_THROW(parse_ecm_case("OT"), InvalidParameter);
}

TEST(Nets, Arithmetic) {
    EXPECT_DOUBLE_EQ(nets(100.0, 50.0), 2.0);
    EXPECT_DOUBLE_EQ(nets(0.0, 13.0), 0.0);
    EXPECT_GT(nets(80.0, 40.0), nets(80.0, 60.0));
    EXPECT_THROW(nets(10.0, 0.0), InvalidParameter);
    EXPECT_THROW(nets(-1.0, 10.0), InvalidParameter);
}

TEST(InCacheBalance, AaEvenIsExactly304) {
    std::vector<Geometry> geoms{make_channel(6, 20, 20), make_fixed_bed(30, 24, 24, 6, 0.6, 9)};
    for (const auto& g : geoms)
        for (const char* order : {"ls:1", "ls:3", "ls:7", "hilbert"})
            for (Variant v : {Variant::aa, Variant::aa_r, Variant::aa_rp}) {
                RunOptions opts;
                opts.variant = v;
                opts.steps = 4;
                const auto sim = run(g, make_ordering(g, parse_order(order)), opts);
                const auto b = in_cache_loop_balance(sim.result.counters);
                EXPECT_EQ(b.even, 304.0) << order;
                if (v == Variant::aa)
                    EXPECT_EQ(b.odd, 376.0);
                else
                    EXPECT_NEAR(b.odd, 304.0 + 76.0 * ria_stats(sim.lattice.blocks, 1).run_density, 1e-9);
            }
}

TEST(InCacheBalance, OsNtIndependentOfOrdering) {
    const auto g = make_fixed_bed(30, 20, 20, 6, 0.7, 1);
    for (const char* order : {"ls:1", "ls:4", "hilbert"}) {
        RunOptions opts;
        opts.steps = 3;
        const auto sim = run(g, make_ordering(g, parse_order(order)), opts);
        const auto b = in_cache_loop_balance(sim.result.counters);
        EXPECT_EQ(b.even, 376.0);
        EXPECT_EQ(b.odd, 376.0);
        EXPECT_EQ(b.average, 376.0);
    }
}

TEST(InCacheBalance, BlockingRaisesOddStepTraffic) {
    const auto g = make_channel(20, 40, 40);
    auto odd_balance = [&](int B) {
        RunOptions opts;
        opts.variant = Variant::aa_rp;
        opts.steps = 2;
        const auto sim = run(g, order_lexicographic(g, B), opts);
        return in_cache_loop_balance(sim.result.counters).odd;
    };
    const double base = odd_balance(1);
    for (int B = 2; B <= 10; ++B)
        EXPECT_GT(odd_balance(B), base) << "B=" << B;
}
