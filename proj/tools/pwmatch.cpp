// pwmatch: bound states and perturbation series of piecewise-constant wells.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pwmatch/commands.hpp"

int main(int argc, char** argv) {
    using namespace pwmatch::cli;

    CLI::App app{"Overlapping-domain matching solver for 1D piecewise-constant potentials"};
    app.require_subcommand(1);
    RunConfig cfg;
    double k_lo = 0, k_hi = 0, e_lo = 0, e_hi = 0;
    std::size_t count = 0;

    auto add = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--spec", cfg.spec_path, "problem document (JSON)")->required();
        sub->add_option("--k-lo", k_lo, "momentum window start, k = sqrt(E - min H)");
        sub->add_option("--k-hi", k_hi, "momentum window end");
        sub->add_option("--e-lo", e_lo, "energy window start");
        sub->add_option("--e-hi", e_hi, "energy window end");
        sub->add_option("--points", cfg.points, "scan resolution / samples per wavefunction")
            ->capture_default_str();
        sub->add_option("--orders", cfg.orders, "highest perturbation order")->capture_default_str();
        sub->add_option("--level", cfg.level, "which level to perturb (0 = lowest in window)")
            ->capture_default_str();
        sub->add_option("--count", count, "number of eigenvalues");
        sub->add_option("--grid", cfg.grid, "finite-difference oracle grid size")
            ->capture_default_str();
        sub->add_option("--out", cfg.out, "output file (default stdout)");
        sub->add_option("--format", cfg.format, "csv or json");
        return sub;
    };
    auto* scan = add("scan", "secular determinant on a momentum grid (CSV)");
    auto* spectrum = add("spectrum", "eigenvalues and matching coefficients (JSON)");
    auto* perturb = add("perturb", "Rayleigh-Schroedinger corrections (JSON)");
    auto* validate = add("validate", "solver against finite-difference and quadrature oracles");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : input_error;
    }

    for (auto* sub : {scan, spectrum, perturb, validate}) {
        if (!sub->parsed()) continue;
        cfg.command = sub->get_name();
        if (sub->count("--k-lo")) cfg.k_lo = k_lo;
        if (sub->count("--k-hi")) cfg.k_hi = k_hi;
        if (sub->count("--e-lo")) cfg.e_lo = e_lo;
        if (sub->count("--e-hi")) cfg.e_hi = e_hi;
        if (sub->count("--count")) cfg.count = count;
    }

    if (cfg.out.empty()) return run(cfg, std::cout, std::cerr);
    std::ofstream file(cfg.out);
    if (!file) {
        std::cerr << "input error: cannot write '" << cfg.out << "'\n";
        return input_error;
    }
    return run(cfg, file, std::cerr);
}
