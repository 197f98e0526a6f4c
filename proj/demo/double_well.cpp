// Lowest doublet of the symmetric-ish double well (0,1)+(2,pi) for growing
// barriers, then the first corrections of the H1 = 10 ground state under
// a linear tilt.

#include <cstdio>
#include <numbers>

#include "pwmatch/perturbation.hpp"
#include "pwmatch/zero_order.hpp"

int main() {
    using namespace pwmatch;
    std::printf("%6s %14s %14s %12s\n", "H1", "E_0", "E_1", "splitting");
    for (double h1 : {10.0, 15.0, 20.0, 25.0}) {
        const auto spec = PotentialSpec::make({0.0, 1.0, 2.0, std::numbers::pi}, {0.0, h1, 0.0});
        const auto scan = find_eigenvalues(spec, 0.1, h1, 2);
        if (scan.energies.size() < 2) continue;
        std::printf("%6.1f %14.10f %14.10f %12.8f\n", h1, scan.energies[0], scan.energies[1],
                    scan.energies[1] - scan.energies[0]);
    }

    const auto spec = PotentialSpec::make({0.0, 1.0, 2.0, std::numbers::pi}, {0.0, 10.0, 0.0});
    const auto tilt = PerturbationSpec::global({0.0, 1.0}, spec.interval_count());
    const auto rep = run_series(spec, tilt, 0.1, 10.0, 0, 4);
    std::printf("\ntilt V1 = x, ground state\n");
    for (std::size_t k = 0; k < rep.energies.size(); ++k) {
        std::printf("  E^(%zu) = % .12e\n", k, rep.energies[k]);
    }
    return 0;
}
