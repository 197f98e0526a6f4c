#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pwmatch/errors.hpp"
#include "pwmatch/oracle.hpp"
#include "pwmatch/perturbation.hpp"
#include "pwmatch/spec_io.hpp"
#include "pwmatch/zero_order.hpp"

namespace pwmatch::cli {

inline constexpr int kFormatVersion = 1;

enum ExitCode : int { ok = 0, validation_failed = 1, input_error = 2, numerical_error = 3 };

struct RunConfig {
    std::string command;
    std::string spec_path;
    std::optional<double> k_lo, k_hi, e_lo, e_hi;
    std::size_t points = 401;
    std::size_t orders = 2;
    std::size_t level = 0;
    std::optional<std::size_t> count;  ///< levels wanted; spectrum defaults to all in the window
    std::size_t grid = 4000;
    std::string out;
    std::string format;  // empty: command default

    /// Throws SchemaError on inconsistent options.
    void validate() const {
        if (k_lo.has_value() != k_hi.has_value()) {
            throw SchemaError("--k-lo/--k-hi", "give both ends of the momentum window");
        }
        if (e_lo.has_value() != e_hi.has_value()) {
            throw SchemaError("--e-lo/--e-hi", "give both ends of the energy window");
        }
        if (k_lo && e_lo) throw SchemaError("window", "give a momentum or an energy window, not both");
        if (k_lo && !(*k_hi > *k_lo)) throw SchemaError("--k-hi", "window is empty");
        if (k_lo && *k_lo < 0.0) throw SchemaError("--k-lo", "momentum must be non-negative");
        if (e_lo && !(*e_hi > *e_lo)) throw SchemaError("--e-hi", "window is empty");
        if (points < 2) throw SchemaError("--points", "resolution must be at least 2 points");
        if (count && *count < 1) throw SchemaError("--count", "must be at least 1");
        if (grid < 1000) throw SchemaError("--grid", "oracle grid must have at least 1000 nodes");
        if (!format.empty() && format != "csv" && format != "json") {
            throw SchemaError("--format", "expected csv or json");
        }
    }
};

/// Energy window: explicit, or from the momentum window, or a default wide enough for
/// `levels` states of the widest well.
inline std::pair<double, double> energy_window(const RunConfig& cfg, const PotentialSpec& spec,
                                               std::size_t levels) {
    if (cfg.e_lo) return {*cfg.e_lo, *cfg.e_hi};
    if (cfg.k_lo) return {energy_of(spec, *cfg.k_lo), energy_of(spec, *cfg.k_hi)};
    const double k = std::numbers::pi * static_cast<double>(levels + 1) / spec.width();
    return {spec.min_height(), spec.max_height() + 2.0 * k * k};
}

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Rows `k,determinant` on a uniform momentum grid; skipped points become `#` comments.
inline int cmd_scan(const RunConfig& cfg, const ProblemSpec& problem, std::ostream& os) {
    const auto& spec = problem.potential;
    double k_lo = 0.0, k_hi = 0.0;
    if (cfg.k_lo) {
        k_lo = *cfg.k_lo;
        k_hi = *cfg.k_hi;
    } else if (cfg.e_lo) {
        k_lo = momentum_of(spec, *cfg.e_lo);
        k_hi = momentum_of(spec, *cfg.e_hi);
    } else {
        throw SchemaError("window", "scan needs --k-lo/--k-hi or --e-lo/--e-hi");
    }
    if (!(k_hi > k_lo)) throw SchemaError("window", "momentum window is empty");

    nlohmann::json rows = nlohmann::json::array();
    nlohmann::json skipped = nlohmann::json::array();
    const bool csv = cfg.format != "json";
    if (csv) os << "k,determinant\n";
    for (std::size_t i = 0; i < cfg.points; ++i) {
        const double k = k_lo + (k_hi - k_lo) * static_cast<double>(i) /
                                    static_cast<double>(cfg.points - 1);
        try {
            const double det = secular_determinant(spec, energy_of(spec, k));
            if (csv) {
                os << fmt17(k) << ',' << fmt17(det) << '\n';
            } else {
                rows.push_back({{"k", k}, {"determinant", det}});
            }
        } catch (const DegenerateEnergy& e) {
            if (csv) {
                os << "# skipped k=" << fmt17(k) << ": " << e.what() << '\n';
            } else {
                skipped.push_back({{"k", k}, {"reason", e.what()}});
            }
        }
    }
    if (!csv) {
        nlohmann::json j{{"format_version", kFormatVersion}, {"command", "scan"},
                         {"momentum", "k = sqrt(E - min H)"}, {"rows", rows},
                         {"skipped", skipped}};
        os << j.dump(2) << '\n';
    }
    return ok;
}

namespace detail {

template <class State>
nlohmann::json state_json(std::size_t index, const State& st) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (std::size_t j = 0; j < st.c.size(); ++j) {
        coeffs.push_back({{"domain", st.domains[j].layout.index}, {"c", st.c[j]}, {"d", st.d[j]}});
    }
    return {{"index", index},
            {"energy", st.energy},
            {"matching_residual", st.residual},
            {"overlap_mismatch", st.overlap_mismatch},
            {"rescalable", st.rescalable},
            {"coefficients", coeffs}};
}

}  // namespace detail

/// Eigenvalues in the window with matching residuals and coefficient tables.
inline int cmd_spectrum(const RunConfig& cfg, const ProblemSpec& problem, std::ostream& os) {
    const auto& spec = problem.potential;
    const auto [lo, hi] = energy_window(cfg, spec, cfg.count.value_or(3));
    auto scan = find_eigenvalues(spec, lo, hi, cfg.count.value_or(100000));
    if (!cfg.count) {
        scan.partial = false;
    } else if (scan.partial) {
        scan.diagnostics.push_back("found " + std::to_string(scan.energies.size()) + " of " +
                                   std::to_string(*cfg.count) + " requested eigenvalues");
    }

    nlohmann::json levels = nlohmann::json::array();
    for (std::size_t i = 0; i < scan.energies.size(); ++i) {
        const double e = scan.energies[i];
        if (spec.is_piecewise_constant()) {
            levels.push_back(detail::state_json(i, match_coefficients(spec, e, false)));
        } else {
            levels.push_back(detail::state_json(i, match_coefficients_series(spec, e)));
        }
        levels.back()["determinant_residual"] = scan.residuals[i];
    }
    if (cfg.format == "csv") {
        os << "index,energy,matching_residual\n";
        for (const auto& l : levels) {
            os << l["index"].get<std::size_t>() << ',' << fmt17(l["energy"].get<double>()) << ','
               << fmt17(l["matching_residual"].get<double>()) << '\n';
        }
        for (const auto& d : scan.diagnostics) os << "# " << d << '\n';
        return ok;
    }
    nlohmann::json warnings = scan.diagnostics;
    if (levels.empty()) warnings.push_back("no eigenvalues in the window");
    nlohmann::json j{{"format_version", kFormatVersion},
                     {"command", "spectrum"},
                     {"window", {{"e_lo", lo}, {"e_hi", hi}}},
                     {"partial", scan.partial},
                     {"eigenvalues", levels},
                     {"warnings", warnings}};
    os << j.dump(2) << '\n';
    return ok;
}

/// Perturbation series E^(0..K) for one level with sampled wavefunctions and diagnostics.
inline int cmd_perturb(const RunConfig& cfg, const ProblemSpec& problem, std::ostream& os) {
    const auto& spec = problem.potential;
    if (!problem.perturbation) throw SchemaError("perturbation", "perturb needs a perturbation");
    const auto& pert = *problem.perturbation;
    const auto [lo, hi] = energy_window(cfg, spec, cfg.level + 1);
    const auto rep = run_series(spec, pert, lo, hi, cfg.level, cfg.orders);

    double summed = 0.0, lk = 1.0;
    for (double e : rep.energies) {
        summed += lk * e;
        lk *= pert.coupling;
    }

    if (cfg.format == "csv") {
        os << "k,energy\n";
        for (std::size_t k = 0; k < rep.energies.size(); ++k) {
            os << k << ',' << fmt17(rep.energies[k]) << '\n';
        }
        return ok;
    }

    nlohmann::json xs = nlohmann::json::array();
    std::vector<nlohmann::json> psi(rep.energies.size(), nlohmann::json::array());
    for (std::size_t i = 0; i < cfg.points; ++i) {
        const double x = spec.left_wall() + spec.width() * static_cast<double>(i) /
                                                static_cast<double>(cfg.points - 1);
        xs.push_back(x);
        psi[0].push_back(rep.state.value(x));
        for (const auto& o : rep.orders) psi[o.k].push_back(o.value(spec, x));
    }
    nlohmann::json orders = nlohmann::json::array();
    for (const auto& o : rep.orders) {
        const auto& d = o.diagnostics;
        orders.push_back({{"k", o.k},
                          {"energy", o.energy},
                          {"X", o.X},
                          {"Z", o.Z},
                          {"xi", o.xi},
                          {"diagnostics",
                           {{"system_residual", d.system_residual},
                            {"rcond", d.rcond},
                            {"equation_residual", d.equation_residual},
                            {"overlap_agreement", d.overlap_agreement},
                            {"value_jump", d.value_jump},
                            {"derivative_jump", d.derivative_jump},
                            {"dirichlet", d.dirichlet},
                            {"overlap_with_zero_order", d.overlap_with_zero}}}});
    }
    nlohmann::json j{{"format_version", kFormatVersion},
                     {"command", "perturb"},
                     {"level", cfg.level},
                     {"coupling", pert.coupling},
                     {"energies", rep.energies},
                     {"energy_at_coupling", summed},
                     {"zero_order", detail::state_json(cfg.level, rep.state)},
                     {"orders", orders},
                     {"samples", {{"x", xs}, {"psi", psi}}}};
    os << j.dump(2) << '\n';
    return ok;
}

struct Check {
    std::string name;
    bool pass;
    double measured;
    double threshold;
    std::string note;
};

/// Least-squares slope of log r against log lambda.
inline double loglog_slope(const std::vector<double>& lambda, const std::vector<double>& r) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        const double x = std::log(lambda[i]), y = std::log(r[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Solver against both oracles; every check is reported with its measured value.
inline std::vector<Check> validation_checks(const RunConfig& cfg, const ProblemSpec& problem) {
    const auto& spec = problem.potential;
    std::vector<Check> checks;
    const auto [lo, hi] = energy_window(cfg, spec, cfg.count.value_or(3));
    const auto scan = find_eigenvalues(spec, lo, hi, cfg.count.value_or(3));
    if (scan.energies.empty()) {
        checks.push_back({"eigenvalues_found", false, 0.0, 1.0, "no eigenvalue in the window"});
        return checks;
    }
    // the oracle counts from the ground state while the window may start higher
    const GridHamiltonian probe(spec, nullptr, 0.0, cfg.grid);
    const std::size_t total = probe.count_below(scan.energies.back() + 1e-6) + 1;
    const auto fd = fd_eigenvalues(spec, cfg.grid, total);
    for (std::size_t i = 0; i < scan.energies.size(); ++i) {
        const double e = scan.energies[i];
        const auto it = std::min_element(fd.energies.begin(), fd.energies.end(), [&](double a, double b) {
            return std::abs(a - e) < std::abs(b - e);
        });
        const auto n = static_cast<std::size_t>(it - fd.energies.begin());
        const double diff = std::abs(e - fd.energies[n]);
        const double tol = fd.errors[n] + 1e-10;
        checks.push_back({"zero_order_vs_oracle[" + std::to_string(i) + "]", diff <= tol, diff, tol,
                          "finite-difference Richardson value " + fmt17(fd.energies[n])});
    }

    if (!problem.perturbation || !spec.is_piecewise_constant()) return checks;
    const auto& pert = *problem.perturbation;
    const std::size_t level = std::min(cfg.level, scan.energies.size() - 1);
    const std::size_t orders = std::max<std::size_t>(cfg.orders, 2);
    const auto state = match_coefficients(spec, scan.energies[level]);
    const auto rep = run_series(spec, pert, state, orders);

    const double rs = rs_first_order(spec, rep.state, pert);
    const double rel = std::abs(rep.energies[1] - rs) / std::max(std::abs(rs), 1e-300);
    checks.push_back({"first_order_vs_quadrature", rel < 1e-8 || std::abs(rep.energies[1] - rs) < 1e-12,
                      rel, 1e-8, "quadrature " + fmt17(rs)});

    double eq = 0, jump = 0, wall = 0;
    for (const auto& o : rep.orders) {
        eq = std::max(eq, o.diagnostics.equation_residual);
        jump = std::max({jump, o.diagnostics.value_jump, o.diagnostics.derivative_jump});
        wall = std::max(wall, o.diagnostics.dirichlet);
    }
    checks.push_back({"correction_equation_residual", eq < 1e-9, eq, 1e-9, ""});
    checks.push_back({"correction_continuity", jump < 1e-9, jump, 1e-9, ""});
    checks.push_back({"correction_dirichlet", wall < 1e-9, wall, 1e-9, ""});

    // lambda sweep against the oracle with V0 + lambda V1
    const std::vector<double> lambdas{1e-2, 3e-3, 1e-3};
    std::vector<double> rem;
    const auto fd0 = fd_eigenvalues(spec, cfg.grid, level + 1);
    for (double lam : lambdas) {
        const auto f = fd_eigenvalues(spec, &pert, lam, cfg.grid, level + 1);
        const double series = rep.energies[0] + lam * rep.energies[1] + lam * lam * rep.energies[2];
        // compare shifts so the oracle's own discretization error cancels to leading order
        const double oracle = rep.energies[0] + (f.energies[level] - fd0.energies[level]);
        rem.push_back(std::abs(oracle - series));
    }
    const double floor = 1e-11;
    const bool noise = std::all_of(rem.begin(), rem.end(), [&](double r) { return r < floor; });
    if (noise) {
        checks.push_back({"series_consistency", true, *std::max_element(rem.begin(), rem.end()), floor,
                          "all remainders below the oracle noise floor"});
    } else {
        for (double& r : rem) r = std::max(r, 1e-300);
        const double slope = loglog_slope(lambdas, rem);
        checks.push_back({"series_consistency", slope >= 2.7, slope, 2.7, "log-log slope of remainder"});
    }
    return checks;
}

inline int cmd_validate(const RunConfig& cfg, const ProblemSpec& problem, std::ostream& os) {
    const auto checks = validation_checks(cfg, problem);
    const bool all = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    if (cfg.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : checks) {
            arr.push_back({{"check", c.name}, {"pass", c.pass}, {"measured", c.measured},
                           {"threshold", c.threshold}, {"note", c.note}});
        }
        os << nlohmann::json{{"format_version", kFormatVersion}, {"command", "validate"},
                             {"pass", all}, {"checks", arr}}
                  .dump(2)
           << '\n';
    } else {
        os << "check,status,measured,threshold,note\n";
        for (const auto& c : checks) {
            os << c.name << ',' << (c.pass ? "PASS" : "FAIL") << ',' << fmt17(c.measured) << ','
               << fmt17(c.threshold) << ',' << c.note << '\n';
        }
    }
    return all ? ok : validation_failed;
}

/// Dispatch one command; maps library errors onto exit codes and reports them on `err`.
inline int run(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
    try {
        cfg.validate();
        const auto problem = load_spec(cfg.spec_path);
        if (cfg.command == "scan") return cmd_scan(cfg, problem, os);
        if (cfg.command == "spectrum") return cmd_spectrum(cfg, problem, os);
        if (cfg.command == "perturb") return cmd_perturb(cfg, problem, os);
        if (cfg.command == "validate") return cmd_validate(cfg, problem, os);
        err << "unknown command '" << cfg.command << "'\n";
        return input_error;
    } catch (const SchemaError& e) {
        err << "input error: " << e.what() << '\n';
        return input_error;
    } catch (const Error& e) {
        err << (e.kind() == ErrorKind::input ? "input error: " : "numerical error: ") << e.what()
            << '\n';
        return e.kind() == ErrorKind::input ? input_error : numerical_error;
    }
}

}  // namespace pwmatch::cli
