#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "slbm/lattice_model.hpp"

using namespace slbm;

TEST(VelocityModel, WeightsSumToOneExactly) {
    int sum = 0;
    for (int n : D3Q19::weight_numerator)
        sum += n;
    EXPECT_EQ(sum, D3Q19::weight_denominator);
    for (int i = 0; i < D3Q19::q; ++i)
        EXPECT_EQ(D3Q19::w[i], static_cast<double>(D3Q19::weight_numerator[i]) / D3Q19::weight_denominator);
}

TEST(VelocityModel, WeightMultiset) {
    std::map<int, int> count;
    for (int n : D3Q19::weight_numerator)
        ++count[n];
    EXPECT_EQ(count[12], 1); // 1/3
    EXPECT_EQ(count[2], 6);  // 1/18
    EXPECT_EQ(count[1], 12); // 1/36
}

TEST(VelocityModel, FirstMomentVanishes) {
    for (int d = 0; d < 3; ++d) {
        int m = 0;
        for (int i = 0; i < D3Q19::q; ++i)
            m += D3Q19::weight_numerator[i] * D3Q19::c[i][d];
        EXPECT_EQ(m, 0);
    }
}

TEST(VelocityModel, SecondMomentIsIsotropic) {
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            int m = 0;
            for (int i = 0; i < D3Q19::q; ++i)
                m += D3Q19::weight_numerator[i] * D3Q19::c[i][a] * D3Q19::c[i][b];
            // sum w c_a c_b = cs^2 delta_ab = 12/36 delta_ab
            EXPECT_EQ(m, a == b ? 12 : 0);
        }
}

TEST(VelocityModel, OppositeIsInvolution) {
    EXPECT_EQ(D3Q19::opposite[D3Q19::center_index], D3Q19::center_index);
    EXPECT_EQ(D3Q19::c[D3Q19::center_index], (std::array<int, 3>{0, 0, 0}));
    for (int i = 0; i < D3Q19::q; ++i) {
        const int o = D3Q19::opposite[i];
        EXPECT_EQ(D3Q19::opposite[o], i);
        for (int d = 0; d < 3; ++d)
            EXPECT_EQ(D3Q19::c[o][d], -D3Q19::c[i][d]);
    }
}

TEST(VelocityModel, DirectionsAreDistinctUnitStencil) {
    for (int i = 0; i < D3Q19::q; ++i) {
        int l1 = 0;
        for (int d = 0; d < 3; ++d)
            l1 += std::abs(D3Q19::c[i][d]);
        EXPECT_LE(l1, 2);
        for (int j = i + 1; j < D3Q19::q; ++j)
            EXPECT_NE(D3Q19::c[i], D3Q19::c[j]);
    }
}

TEST(Channel, FullSizeFluidCount) {
    // 500 x 98 x 98: walls on the y and z faces only.
    EXPECT_EQ(fluid_count(make_channel(500, 100, 100)), 4'802'000u);
}

TEST(Channel, MinimalCrossSection) { EXPECT_EQ(fluid_count(make_channel(3, 3, 3)), 3u); }

TEST(Channel, SmallCountMatchesEnumeration) {
    const auto g = make_channel(10, 4, 4);
    std::size_t expected = 0;
    for (int x = 0; x < 10; ++x)
        for (int y = 0; y < 4; ++y)
            for (int z = 0; z < 4; ++z)
                expected += (y > 0 && y < 3 && z > 0 && z < 3) ? 1 : 0;
    EXPECT_EQ(expected, 40u);
    EXPECT_EQ(fluid_count(g), expected);
}

TEST(Channel, RejectsSmallDimensions) {
    EXPECT_THROW(make_channel(2, 10, 10), InvalidGeometry);
    EXPECT_THROW(make_channel(10, 2, 10), InvalidGeometry);
    EXPECT_THROW(make_channel(10, 10, 0), InvalidGeometry);
}

TEST(Channel, SymmetricUnderYZExchange) {
    const auto a = make_channel(6, 5, 8);
    const auto b = make_channel(6, 8, 5);
    for (int x = 0; x < 6; ++x)
        for (int y = 0; y < 5; ++y)
            for (int z = 0; z < 8; ++z)
                EXPECT_EQ(a.at(x, y, z), b.at(x, z, y));
    EXPECT_EQ(make_channel(6, 5, 8), a);
}

namespace {
void expect_closed_in_yz(const Geometry& g) {
    const auto& d = g.dims();
    for (int x = 0; x < d.nx; ++x)
        for (int y = 0; y < d.ny; ++y)
            for (int z = 0; z < d.nz; ++z) {
                if (!g.is_fluid(x, y, z))
                    continue;
                for (int i = 1; i < D3Q19::q; ++i) {
                    const int yy = y + D3Q19::c[i][1];
                    const int zz = z + D3Q19::c[i][2];
                    ASSERT_TRUE(yy >= 0 && yy < d.ny && zz >= 0 && zz < d.nz);
                }
            }
}
} // namespace

TEST(Channel, FluidStencilStaysInsideYZ) { expect_closed_in_yz(make_channel(7, 6, 5)); }

TEST(FixedBed, FullSizeFluidCountOrder) {
    FixedBedInfo info;
    const auto g = make_fixed_bed(500, 100, 100, 20, 0.44, 42, {}, &info);
    const auto n = fluid_count(g);
    EXPECT_GE(n, 1'900'000u);
    EXPECT_LE(n, 2'300'000u);
    EXPECT_LE(info.porosity, 0.44);
    EXPECT_GT(info.spheres, 0u);
    expect_closed_in_yz(g);
}

TEST(FixedBed, DeterministicForSeed) {
    const auto a = make_fixed_bed(60, 30, 30, 8, 0.6, 7);
    const auto b = make_fixed_bed(60, 30, 30, 8, 0.6, 7);
    const auto c = make_fixed_bed(60, 30, 30, 8, 0.6, 8);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(FixedBed, HighTargetPlacesAtLeastOneSphere) {
    FixedBedInfo info;
    const auto g = make_fixed_bed(20, 12, 12, 3, 0.999, 1, {}, &info);
    EXPECT_GE(info.spheres, 1u);
    EXPECT_LT(fluid_count(g), fluid_count(make_channel(20, 12, 12)));
}

TEST(FixedBed, StopsAtFirstCrossing) {
    FixedBedInfo info;
    const auto g = make_fixed_bed(40, 20, 20, 6, 0.7, 3, {}, &info);
    const double channel = static_cast<double>(fluid_count(make_channel(40, 20, 20)));
    EXPECT_DOUBLE_EQ(info.porosity, static_cast<double>(fluid_count(g)) / channel);
    EXPECT_LE(info.porosity, 0.7);
    EXPECT_GT(info.porosity, 0.5); // one sphere cannot remove 20 % of this box
}

TEST(FixedBed, InvalidParameters) {
    EXPECT_THROW(make_fixed_bed(20, 10, 10, 2, 0.5, 1), InvalidParameter);
    EXPECT_THROW(make_fixed_bed(20, 10, 10, 4, 0.0, 1), InvalidParameter);
    EXPECT_THROW(make_fixed_bed(20, 10, 10, 4, 1.0, 1), InvalidParameter);
}

TEST(FixedBed, ReportsFailureWithAchievedPorosity) {
    FixedBedOptions opts;
    opts.min_center_distance = 1.0;
    opts.max_attempts = 200;
    try {
        make_fixed_bed(30, 20, 20, 10, 0.05, 5, opts);
        FAIL() << "expected a packing failure";
    } catch (const PackingFailure& e) {
        EXPECT_GT(e.achieved_porosity(), 0.05);
        EXPECT_LT(e.achieved_porosity(), 1.0);
    }
}
