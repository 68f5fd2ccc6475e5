// Run-length statistics and loop balances for the channel and a packed bed
// under several enumerations.

#include <cstdio>
#include <string>
#include <vector>

#include "slbm/slbm.hpp"

int main() {
    using namespace slbm;
    struct Case {
        std::string name;
        Geometry geometry;
    };
    std::vector<Case> cases;
    cases.push_back({"channel 200x60x60", make_channel(200, 60, 60)});
    cases.push_back({"fixed bed 200x60x60", make_fixed_bed(200, 60, 60, 12, 0.44, 42)});

    std::printf("%-22s %-10s %9s %8s %8s %10s %10s\n", "geometry", "order", "r", "runlen", "vec(4)", "os-nt-r",
                "aa-r");
    for (const auto& c : cases)
        for (const char* order : {"ls:1", "ls:4", "ls:16", "hilbert"}) {
            const auto o = make_ordering(c.geometry, parse_order(order));
            const auto s = ria_stats(build_lattice(c.geometry, o).blocks, 4);
            std::printf("%-22s %-10s %9.5f %8.2f %8.4f %10.2f %10.2f\n", c.name.c_str(), order, s.run_density,
                        s.mean_run_length, s.vectorizable_fraction,
                        loop_balance(Variant::os_nt_r, s.run_density).bytes_per_flup,
                        loop_balance(Variant::aa_r, s.run_density).bytes_per_flup);
        }
    return 0;
}
