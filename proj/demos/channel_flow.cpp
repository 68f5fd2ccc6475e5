// Force-driven flow through a square duct, run with the batched in-place
// variant. Prints the converged cross-section profile along y at mid-height.

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "slbm/slbm.hpp"

int main(int argc, char** argv) {
    using namespace slbm;
    const int n = argc > 1 ? std::atoi(argv[1]) : 24;
    const std::size_t steps = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 4000;

    const Geometry g = make_channel(4, n, n);
    const Ordering o = order_lexicographic(g, 1);

    RunOptions opts;
    opts.variant = Variant::aa_rp;
    opts.params = TrtParams::from_magic(1.0, default_magic, {1e-6, 0.0, 0.0});
    opts.steps = steps;
    opts.workers = 2;

    const auto sim = run(g, o, opts);
    const auto m = macroscopic(sim.result.field, sim.lattice, opts.params.body_force);

    std::printf("duct %dx%d, %zu steps, %.1f MFLUP/s\n", n - 2, n - 2, steps, sim.result.mflups);
    std::printf("%4s %14s\n", "y", "u_x");
    const int zmid = n / 2;
    for (int y = 1; y < n - 1; ++y) {
        const auto r = o.rank_of({0, y, zmid});
        std::printf("%4d %14.6e\n", y, m.u[r][0]);
    }
    const double mass0 = static_cast<double>(o.size());
    std::printf("relative mass change %.3e\n", (total_mass(sim.result.field) - mass0) / mass0);
    return 0;
}
