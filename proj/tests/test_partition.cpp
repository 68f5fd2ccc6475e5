#include <gtest/gtest.h>

#include "oracles.hpp"
#include "slbm/partition.hpp"

using namespace slbm;

namespace {

// PDFs crossing one x-cut of a channel: links with c_x = +1 whose upstream
// cell in the cross-section is fluid.
std::size_t face_crossings(const Geometry& g) {
    std::size_t count = 0;
    const auto& d = g.dims();
    for (int y = 0; y < d.ny; ++y)
        for (int z = 0; z < d.nz; ++z) {
            if (!g.is_fluid(0, y, z))
                continue;
            for (int i = 1; i < D3Q19::q; ++i) {
                if (D3Q19::c[i][0] != 1)
                    continue;
                if (g.is_fluid(0, y - D3Q19::c[i][1], z - D3Q19::c[i][2]))
                    ++count;
            }
        }
    return count;
}

double max_field_diff(const Moments& a, const Moments& b) {
    double m = 0;
    for (std::size_t n = 0; n < a.rho.size(); ++n) {
        m = std::max(m, std::abs(a.rho[n] - b.rho[n]) / std::abs(b.rho[n]));
        for (int d = 0; d < 3; ++d)
            m = std::max(m, std::abs(a.u[n][d] - b.u[n][d]));
    }
    return m;
}

RunOptions driven(Variant v, std::size_t steps) {
    RunOptions opts;
    opts.variant = v;
    opts.steps = steps;
    opts.params = TrtParams::from_magic(1.2, default_magic, {1e-5, 0, 2e-6});
    opts.u0 = {0.01, 0.0, 0.0};
    return opts;
}

} // namespace

TEST(MakePartition, Sizes) {
    const auto pm = make_partition(10, 3);
    EXPECT_EQ(pm.bounds, (std::vector<std::size_t>{0, 4, 7, 10}));
    EXPECT_EQ(pm.size(0), 4u);
    EXPECT_EQ(pm.size(1), 3u);
    EXPECT_EQ(pm.owner[3], 0u);
    EXPECT_EQ(pm.owner[4], 1u);
    EXPECT_EQ(pm.owner[9], 2u);
    EXPECT_EQ(make_partition(10, 1).bounds, (std::vector<std::size_t>{0, 10}));
    const auto singles = make_partition(6, 6);
    for (std::size_t p = 0; p < 6; ++p)
        EXPECT_EQ(singles.size(p), 1u);
    EXPECT_THROW(make_partition(10, 0), InvalidParameter);
    EXPECT_THROW(make_partition(10, 11), InvalidParameter);
}

TEST(MakePartition, SizesDifferByAtMostOne) {
    for (std::size_t n : {7u, 100u, 1001u})
        for (std::size_t p = 1; p <= std::min<std::size_t>(n, 40); ++p) {
            const auto pm = make_partition(n, p);
            std::size_t lo = n, hi = 0;
            for (std::size_t k = 0; k < p; ++k) {
                lo = std::min(lo, pm.size(k));
                hi = std::max(hi, pm.size(k));
            }
            EXPECT_LE(hi - lo, 1u);
            EXPECT_EQ(pm.bounds.back(), n);
        }
}

TEST(CommStats, SinglePartitionHasNoGhosts) {
    const auto g = make_channel(16, 8, 8);
    const auto o = order_lexicographic(g, 1);
    const auto rep = comm_stats(build_lattice(g, o), make_partition(o, 1));
    EXPECT_EQ(rep.total_ghost_pdfs, 0u);
    EXPECT_EQ(rep.parts[0].neighbors, 0u);
}

TEST(CommStats, SlabsHaveTwoNeighborsAndExactFaceCounts) {
    const auto g = make_channel(128, 32, 32);
    const auto o = order_lexicographic(g, 1);
    const auto lat = build_lattice(g, o);
    const std::size_t face = face_crossings(g);
    EXPECT_EQ(face, 4380u); // 5 x 30 x 30 minus the links cut off at the walls
    for (std::size_t P : {4u, 8u}) {
        const auto rep = comm_stats(lat, make_partition(o, P));
        std::size_t in = 0, out = 0;
        for (const auto& pc : rep.parts) {
            EXPECT_EQ(pc.neighbors, 2u);
            EXPECT_EQ(pc.ghost_pdfs_in, 2 * face);
            EXPECT_EQ(pc.ghost_bytes, 16 * face);
            in += pc.ghost_pdfs_in;
            out += pc.ghost_pdfs_out;
        }
        EXPECT_EQ(in, out);
        EXPECT_EQ(rep.total_ghost_bytes, P * 16 * face);
        EXPECT_EQ(rep.max_neighbors, 2u);
    }
}

TEST(CommStats, HilbertBeatsThinSlabs) {
    const auto g = make_channel(128, 32, 32);
    const auto ls = order_lexicographic(g, 1);
    const auto hi = order_hilbert(g);
    const auto lls = build_lattice(g, ls), lhi = build_lattice(g, hi);
    for (std::size_t P : {16u, 32u, 64u})
        EXPECT_LT(comm_stats(lhi, make_partition(hi, P)).total_ghost_bytes,
                  comm_stats(lls, make_partition(ls, P)).total_ghost_bytes)
            << "P=" << P;
}

TEST(CommStats, IncomingEqualsOutgoingOnRandomGeometries) {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 5; ++t) {
        const auto g = oracle::random_geometry(rng, 12, 10, 9, 0.2);
        const auto o = order_hilbert(g);
        const auto rep = comm_stats(build_lattice(g, o, t % 2 ? Convention::aa : Convention::pull),
                                    make_partition(o, 3 + t));
        std::size_t in = 0, out = 0;
        for (const auto& pc : rep.parts) {
            in += pc.ghost_pdfs_in;
            out += pc.ghost_pdfs_out;
        }
        EXPECT_EQ(in, out);
        EXPECT_EQ(rep.total_ghost_pdfs, in);
    }
}

TEST(CommStats, MismatchedMapIsRejected) {
    const auto g = make_channel(8, 5, 5);
    const auto o = order_lexicographic(g, 1);
    EXPECT_THROW(comm_stats(build_lattice(g, o), make_partition(o.size() - 1, 2)), InvalidPartition);
}

TEST(Renumbering, GhostTotalsUnchanged) {
    const auto g = make_channel(128, 32, 32);
    const auto hi = order_hilbert(g);
    for (std::size_t P : {2u, 8u, 13u}) {
        const auto pm = make_partition(hi, P);
        const auto rp = renumber_partitions(g, P);
        EXPECT_EQ(rp.partition.bounds, pm.bounds);
        const auto a = comm_stats(build_lattice(g, hi), pm);
        const auto b = comm_stats(build_lattice(g, rp.ordering), rp.partition);
        EXPECT_EQ(a.total_ghost_bytes, b.total_ghost_bytes);
        for (std::size_t p = 0; p < P; ++p) {
            EXPECT_EQ(a.parts[p].ghost_pdfs_in, b.parts[p].ghost_pdfs_in);
            EXPECT_EQ(a.parts[p].neighbors, b.parts[p].neighbors);
        }
    }
}

TEST(Renumbering, RunLengthsDoNotShrink) {
    const auto g = make_channel(128, 32, 32);
    const auto hi = order_hilbert(g);
    const auto pm = make_partition(hi, 8);
    const auto rp = renumber_partitions(g, 8);
    const auto before = mean_run_length_per_chunk(build_lattice(g, hi).blocks, pm);
    const auto after = mean_run_length_per_chunk(build_lattice(g, rp.ordering).blocks, rp.partition);
    for (std::size_t p = 0; p < 8; ++p)
        EXPECT_GE(after[p], before[p]);
}

TEST(Renumbering, SinglePartitionIsPlainOrder) {
    const auto g = make_fixed_bed(30, 16, 16, 5, 0.7, 2);
    EXPECT_TRUE(renumber_partitions(g, 1).ordering.nodes == order_lexicographic(g, 1).nodes);
}

TEST(RunPartitioned, SinglePartitionMatchesPlainRun) {
    const auto g = make_channel(24, 9, 10);
    const auto o = order_lexicographic(g, 1);
    for (Variant v : all_variants) {
        const auto opts = driven(v, 7);
        const auto a = run_partitioned(g, o, make_partition(o, 1), opts);
        const auto b = run(g, o, opts);
        EXPECT_TRUE(std::equal(a.field.values().begin(), a.field.values().end(), b.result.field.values().begin()))
            << to_string(v);
        EXPECT_EQ(a.counters, b.result.counters);
        for (auto bytes : a.exchanged_bytes)
            EXPECT_EQ(bytes, 0u);
    }
}

TEST(RunPartitioned, FourPartsMatchOne) {
    const auto g = make_channel(64, 16, 16);
    const auto o = order_lexicographic(g, 1);
    for (Variant v : all_variants) {
        const auto opts = driven(v, 20);
        const auto one = run_partitioned(g, o, make_partition(o, 1), opts);
        const auto four = run_partitioned(g, o, make_partition(o, 4), opts);
        const auto f = opts.params.body_force;
        EXPECT_LE(max_field_diff(macroscopic(four.field, four.lattice, f), macroscopic(one.field, one.lattice, f)),
                  1e-10)
            << to_string(v);
    }
}

TEST(RunPartitioned, IndependentOfPartsAndWorkers) {
    const auto g = make_fixed_bed(40, 20, 20, 6, 0.6, 5);
    const auto o = order_hilbert(g);
    for (Variant v : {Variant::os_nt_r, Variant::aa_rp}) {
        auto opts = driven(v, 12);
        const auto ref = run(g, o, opts);
        const auto mref = macroscopic(ref.result.field, ref.lattice, opts.params.body_force);
        for (std::size_t P : {2u, 5u, 8u})
            for (unsigned W : {1u, 4u}) {
                opts.workers = W;
                const auto res = run_partitioned(g, o, make_partition(o, P), opts);
                EXPECT_LE(max_field_diff(macroscopic(res.field, res.lattice, opts.params.body_force), mref), 1e-10)
                    << to_string(v) << " P=" << P << " W=" << W;
            }
    }
}

TEST(RunPartitioned, ExchangedBytesMatchCommStats) {
    const auto g = make_channel(32, 10, 12);
    const auto rp = renumber_partitions(g, 6);
    const auto lat = build_lattice(g, rp.ordering);
    const std::size_t ghost = comm_stats(lat, rp.partition).total_ghost_bytes;
    ASSERT_GT(ghost, 0u);
    for (Variant v : all_variants) {
        const auto res = run_partitioned(g, rp.ordering, rp.partition, driven(v, 6));
        EXPECT_EQ(res.comm.total_ghost_bytes, ghost);
        ASSERT_EQ(res.exchanged_bytes.size(), 6u);
        std::size_t sum = 0;
        for (std::size_t s = 0; s < 6; ++s) {
            sum += res.exchanged_bytes[s];
            if (!is_aa(v))
                EXPECT_EQ(res.exchanged_bytes[s], ghost);
            else
                // Fetched before and returned after the odd step.
                EXPECT_EQ(res.exchanged_bytes[s], s % 2 ? 2 * ghost : 0u);
        }
        EXPECT_EQ(sum, 6 * ghost) << to_string(v);
    }
}

TEST(RunPartitioned, MismatchedPartitionIsRejected) {
    const auto g = make_channel(8, 5, 5);
    const auto o = order_lexicographic(g, 1);
    EXPECT_THROW(run_partitioned(g, o, make_partition(o.size() + 1, 2), driven(Variant::os_nt, 1)),
                 InvalidPartition);
}
