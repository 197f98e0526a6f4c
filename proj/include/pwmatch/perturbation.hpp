#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pwmatch/banded_operator.hpp"
#include "pwmatch/domain_basis.hpp"
#include "pwmatch/errors.hpp"
#include "pwmatch/potential.hpp"
#include "pwmatch/quadrature.hpp"
#include "pwmatch/trig_poly.hpp"
#include "pwmatch/zero_order.hpp"

namespace pwmatch {

/// A function on one double interval, as the pieces left and right of the anchor.
struct LocalPair {
    DomainLayout layout;
    TrigPoly left;
    TrigPoly right;

    const TrigPoly& piece(double x) const { return x < layout.anchor ? left : right; }
    double value(double x) const { return piece(x).eval(x); }
    double deriv(double x) const { return piece(x).eval_deriv(x); }
    double at_left() const { return left.eval(layout.left_end); }
    double at_right() const { return right.eval(layout.right_end); }
};

inline LocalPair combine(const LocalPair& a, cplx sa, const LocalPair& b, cplx sb) {
    LocalPair out{a.layout, a.left * sa, a.right * sa};
    out.left.accumulate(b.left, sb);
    out.right.accumulate(b.right, sb);
    return out;
}

/// psi^(0) in the representation of every domain: c(j) C_j + d(j) S_j.
inline std::vector<LocalPair> zero_order_pairs(const MatchedState& state) {
    std::vector<LocalPair> out;
    for (std::size_t j = 0; j < state.domains.size(); ++j) {
        const auto& d = state.domains[j];
        out.push_back(LocalPair{d.layout, d.cos_left * state.c[j] + d.sin_left * state.d[j],
                                d.cos_right * state.c[j] + d.sin_right * state.d[j]});
    }
    return out;
}

/// omega_j: H omega_j = psi^(0) with omega_j(L_j) = omega_j'(L_j) = 0.
struct OmegaSet {
    std::vector<LocalPair> domains;
};

inline OmegaSet build_omega(const MatchedState& state, double beta_floor = kDefaultBetaFloor) {
    OmegaSet out;
    for (const auto& psi : zero_order_pairs(state)) {
        out.domains.push_back(LocalPair{psi.layout, solve_initial_value(psi.left, 0.0, 0.0, beta_floor),
                                        solve_initial_value(psi.right, 0.0, 0.0, beta_floor)});
    }
    return out;
}

struct OrderDiagnostics {
    double system_residual = 0.0;  ///< max |A u - b| relative to |A||u| + |b|
    double rcond = 0.0;            ///< reciprocal condition estimate of the correction system
    double equation_residual = 0.0;  ///< max |H psi^(k) - tau - E^(k) psi^(0)| at sample points
    double overlap_agreement = 0.0;  ///< max disagreement of neighbouring domains on their overlap
    double value_jump = 0.0;         ///< max value jump of the assembled psi^(k) at breakpoints
    double derivative_jump = 0.0;    ///< max derivative jump at breakpoints
    double dirichlet = 0.0;          ///< max |psi^(k)| at the walls
    double overlap_with_zero = 0.0;  ///< <psi^(0)|psi^(k)> / <psi^(0)|psi^(0)>
};

/// Correction of order k in the c+d=1 convention:
///   psi^(k)_j = X_j C^(k)_j + (1 - X_j) S^(k)_j + E^(k) omega_j + xi_j psi^(0)_j
/// with xi_1 = 0 and xi_j = xi_{j-1} + Z_j.
struct OrderResult {
    std::size_t k = 0;
    double energy = 0.0;
    std::vector<double> X;
    std::vector<double> Z;   ///< Z_2..Z_n
    std::vector<double> xi;  ///< xi_1..xi_n
    std::vector<LocalPair> psi;
    std::vector<TrigPoly> global;  ///< psi^(k) on intervals 0..N
    OrderDiagnostics diagnostics;

    double value(const PotentialSpec& spec, double x) const {
        return global[spec.interval_of(x)].eval(x);
    }
};

/// Right-hand side tau^(k-1) = -V1 psi^(k-1) + sum_{m=1}^{k-1} E^(m) psi^(k-m), per domain.
inline std::vector<LocalPair> build_tau(std::size_t k, const PotentialSpec& spec,
                                        const MatchedState& state,
                                        const std::vector<OrderResult>& history,
                                        const PerturbationSpec& pert) {
    if (k < 1) throw SequencingError("build_tau: order must be at least 1");
    if (history.size() < k - 1) {
        std::ostringstream os;
        os << "build_tau: order " << k << " needs corrections 1.." << k - 1 << ", only "
           << history.size() << " available";
        throw SequencingError(os.str());
    }
    for (std::size_t m = 1; m < k; ++m) {
        if (history[m - 1].k != m) {
            throw SequencingError("build_tau: correction history is out of order");
        }
    }
    const auto psi0 = zero_order_pairs(state);
    auto psi = [&](std::size_t m, std::size_t j) -> const LocalPair& {
        return m == 0 ? psi0[j] : history[m - 1].psi[j];
    };

    std::vector<LocalPair> out;
    for (std::size_t j = 0; j < psi0.size(); ++j) {
        const auto& l = psi0[j].layout;
        const auto& prev = psi(k - 1, j);
        const auto vl = shift_polynomial(pert.interval_polys[l.left_interval], l.anchor);
        const auto vr = shift_polynomial(pert.interval_polys[l.right_interval], l.anchor);
        LocalPair t{l, mul_polynomial(prev.left, vl) * -1.0, mul_polynomial(prev.right, vr) * -1.0};
        for (std::size_t m = 1; m < k; ++m) {
            const auto& p = psi(k - m, j);
            t.left.accumulate(p.left, history[m - 1].energy);
            t.right.accumulate(p.right, history[m - 1].energy);
        }
        out.push_back(std::move(t));
    }
    (void)spec;
    return out;
}

/// C^(k)_j and S^(k)_j: H f = tau^(k-1) with cosine-like and sine-like data at L_j.
struct OrderBasis {
    std::size_t k = 0;
    std::vector<LocalPair> tau;
    std::vector<LocalPair> cos;
    std::vector<LocalPair> sin;
};

inline OrderBasis build_order_basis(std::size_t k, std::vector<LocalPair> tau,
                                    double beta_floor = kDefaultBetaFloor) {
    OrderBasis b;
    b.k = k;
    for (const auto& t : tau) {
        b.cos.push_back(LocalPair{t.layout, solve_initial_value(t.left, 1.0, 0.0, beta_floor),
                                  solve_initial_value(t.right, 1.0, 0.0, beta_floor)});
        b.sin.push_back(LocalPair{t.layout, solve_initial_value(t.left, 0.0, 1.0, beta_floor),
                                  solve_initial_value(t.right, 0.0, 1.0, beta_floor)});
    }
    b.tau = std::move(tau);
    return b;
}

namespace detail {

inline constexpr std::size_t kSamplesPerPiece = 50;

template <class F>
void for_samples(double a, double b, F&& f) {
    if (!(b > a)) return;
    for (std::size_t i = 0; i < kSamplesPerPiece; ++i) {
        f(a + (b - a) * (static_cast<double>(i) + 0.5) / static_cast<double>(kSamplesPerPiece));
    }
}

inline void fill_diagnostics(const PotentialSpec& spec, const MatchedState& state,
                             const OrderBasis& basis, OrderResult& r) {
    auto& dg = r.diagnostics;
    const auto psi0 = zero_order_pairs(state);
    const double e0 = state.energy;

    // equation residual on every piece of every domain
    for (std::size_t j = 0; j < r.psi.size(); ++j) {
        const auto& l = r.psi[j].layout;
        auto check = [&](const TrigPoly& f, const TrigPoly& tau, const TrigPoly& p0,
                         std::size_t interval, double a, double b) {
            TrigPoly res = apply_hamiltonian(f, spec.heights[interval] - e0, 0.0);
            res.accumulate(tau, -1.0);
            res.accumulate(p0, -r.energy);
            for_samples(a, b, [&](double x) {
                const double scale = std::max({1.0, std::abs(tau.eval(x)), std::abs(p0.eval(x))});
                dg.equation_residual = std::max(dg.equation_residual, std::abs(res.value_complex(x)) / scale);
            });
        };
        check(r.psi[j].left, basis.tau[j].left, psi0[j].left, l.left_interval, l.left_end, l.anchor);
        check(r.psi[j].right, basis.tau[j].right, psi0[j].right, l.right_interval, l.anchor,
              l.right_end);
    }

    // neighbouring domains share interval j (right piece of j, left piece of j+1)
    for (std::size_t j = 0; j + 1 < r.psi.size(); ++j) {
        const auto& a = r.psi[j].right;
        const auto& b = r.psi[j + 1].left;
        for_samples(r.psi[j].layout.anchor, r.psi[j + 1].layout.anchor, [&](double x) {
            const double scale = std::max(1.0, std::abs(a.eval(x)));
            dg.overlap_agreement = std::max(dg.overlap_agreement, std::abs(a.eval(x) - b.eval(x)) / scale);
        });
    }

    const auto& L = spec.breakpoints;
    const std::size_t n = spec.interior_count();
    for (std::size_t i = 1; i <= n; ++i) {
        const auto& lp = r.global[i - 1];
        const auto& rp = r.global[i];
        const double scale = std::max({1.0, std::abs(rp.eval(L[i])), std::abs(rp.eval_deriv(L[i]))});
        dg.value_jump = std::max(dg.value_jump, std::abs(lp.eval(L[i]) - rp.eval(L[i])) / scale);
        dg.derivative_jump =
            std::max(dg.derivative_jump, std::abs(lp.eval_deriv(L[i]) - rp.eval_deriv(L[i])) / scale);
    }
    dg.dirichlet = std::max(std::abs(r.global.front().eval(L.front())),
                            std::abs(r.global.back().eval(L.back())));

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        num += integrate([&](double x) { return state.value(x) * r.global[i].eval(x); }, L[i], L[i + 1]);
        den += integrate([&](double x) { return state.value(x) * state.value(x); }, L[i], L[i + 1]);
    }
    dg.overlap_with_zero = num / den;
}

}  // namespace detail

/// Solve the 2n matching system in (E^(k), X_1..X_n, Z_2..Z_n) and assemble psi^(k).
///
/// Row pair of domain j (left end L_{j-1}, right end L_{j+1}):
///   (C - S)(L_{j-1}) X_j + omega_j(L_{j-1}) E - X_{j-1} + c(j-1) Z_j = -S(L_{j-1})
///   (C - S)(L_{j+1}) X_j + omega_j(L_{j+1}) E - X_{j+1} - c(j+1) Z_{j+1} = -S(L_{j+1})
/// where C, S are C^(k)_j, S^(k)_j and terms reaching past the walls are dropped.
inline OrderResult solve_order(const PotentialSpec& spec, const MatchedState& state,
                               const OmegaSet& omega, const OrderBasis& basis) {
    const std::size_t n = state.domains.size();
    const auto N = static_cast<Eigen::Index>(n);
    if (omega.domains.size() != n || basis.cos.size() != n) {
        throw ContractViolation("solve_order: omega and order basis must cover every domain");
    }
    // column layout: 0 -> E, 1..n -> X_j, n+1..2n-1 -> Z_2..Z_n
    auto col_x = [](std::size_t j) { return static_cast<Eigen::Index>(j + 1); };
    auto col_z = [&](std::size_t j) { return static_cast<Eigen::Index>(n + j); };  // j >= 1

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    Eigen::VectorXd rhs(2 * N);
    for (std::size_t j = 0; j < n; ++j) {
        const auto r0 = static_cast<Eigen::Index>(2 * j);
        const auto& C = basis.cos[j];
        const auto& S = basis.sin[j];
        const double sl = S.at_left(), sr = S.at_right();
        a(r0, col_x(j)) = C.at_left() - sl;
        a(r0, 0) = omega.domains[j].at_left();
        rhs(r0) = -sl;
        if (j > 0) {
            a(r0, col_x(j - 1)) = -1.0;
            a(r0, col_z(j)) = state.c[j - 1];
        }
        a(r0 + 1, col_x(j)) = C.at_right() - sr;
        a(r0 + 1, 0) = omega.domains[j].at_right();
        rhs(r0 + 1) = -sr;
        if (j + 1 < n) {
            a(r0 + 1, col_x(j + 1)) = -1.0;
            a(r0 + 1, col_z(j + 1)) = -state.c[j + 1];
        }
    }

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-12)) {
        std::ostringstream os;
        os << "order " << basis.k << ": correction system is singular (reciprocal condition "
           << rcond << "); no solution of the matching conditions exists at this order";
        throw SingularSystem(os.str());
    }
    const Eigen::VectorXd u = lu.solve(rhs);

    OrderResult r;
    r.k = basis.k;
    r.energy = u(0);
    r.diagnostics.rcond = rcond;
    {
        const Eigen::VectorXd res = a * u - rhs;
        const Eigen::VectorXd scale = a.cwiseAbs() * u.cwiseAbs() + rhs.cwiseAbs();
        for (Eigen::Index i = 0; i < res.size(); ++i) {
            r.diagnostics.system_residual = std::max(
                r.diagnostics.system_residual, std::abs(res(i)) / std::max(scale(i), 1e-300));
        }
    }
    r.xi.push_back(0.0);
    for (std::size_t j = 0; j < n; ++j) r.X.push_back(u(col_x(j)));
    for (std::size_t j = 1; j < n; ++j) {
        r.Z.push_back(u(col_z(j)));
        r.xi.push_back(r.xi.back() + r.Z.back());
    }

    const auto psi0 = zero_order_pairs(state);
    for (std::size_t j = 0; j < n; ++j) {
        LocalPair p = combine(basis.cos[j], r.X[j], basis.sin[j], 1.0 - r.X[j]);
        p.left.accumulate(omega.domains[j].left, r.energy);
        p.right.accumulate(omega.domains[j].right, r.energy);
        p.left.accumulate(psi0[j].left, r.xi[j]);
        p.right.accumulate(psi0[j].right, r.xi[j]);
        r.psi.push_back(std::move(p));
    }
    for (std::size_t i = 0; i < spec.interval_count(); ++i) {
        const auto j = state.domain_for_interval(i);
        r.global.push_back(i == 0 && state.domains[0].layout.index != 0 ? r.psi[0].left
                                                                         : r.psi[j].right);
    }
    detail::fill_diagnostics(spec, state, basis, r);
    return r;
}

struct SeriesReport {
    MatchedState state;
    std::vector<double> energies;  ///< E^(0), E^(1), ...
    std::vector<OrderResult> orders;
};

/// Corrections 1..order_max around a matched zero-order state.
inline SeriesReport run_series(const PotentialSpec& spec, const PerturbationSpec& pert,
                               MatchedState state, std::size_t order_max) {
    auto staged = [](const char* stage, auto&& f) -> decltype(auto) {
        try {
            return f();
        } catch (const StageError&) {
            throw;
        } catch (const Error& e) {
            throw StageError(stage, e);
        }
    };
    if (order_max > 0) {
        staged("S1 local bases", [&] {
            if (!spec.is_piecewise_constant()) {
                throw ContractViolation(
                    "perturbation corrections need a piecewise-constant zero-order potential");
            }
            pert.validate(spec.interval_count());
            return 0;
        });
        staged("S2 matching", [&] {
            if (!state.rescalable) {
                throw NormalizationObstruction(
                    "c(j) + d(j) vanishes in some domain; the c+d=1 rescaling is impossible");
            }
            return 0;
        });
    }

    SeriesReport rep{std::move(state), {}, {}};
    rep.energies.push_back(rep.state.energy);
    if (order_max == 0) return rep;

    const OmegaSet omega = staged("S3 omega", [&] { return build_omega(rep.state); });
    for (std::size_t k = 1; k <= order_max; ++k) {
        const std::string tag = " (order " + std::to_string(k) + ")";
        auto basis = staged(("S4 order basis" + tag).c_str(), [&] {
            return build_order_basis(k, build_tau(k, spec, rep.state, rep.orders, pert));
        });
        auto result = staged(("S5 correction system" + tag).c_str(),
                             [&] { return solve_order(spec, rep.state, omega, basis); });
        rep.energies.push_back(result.energy);
        rep.orders.push_back(std::move(result));
    }
    return rep;
}

/// Full pipeline S1-S6: locate the level-th eigenvalue in [e_lo, e_hi], match, iterate.
inline SeriesReport run_series(const PotentialSpec& spec, const PerturbationSpec& pert, double e_lo,
                               double e_hi, std::size_t level, std::size_t order_max) {
    MatchedState state = [&] {
        try {
            const auto scan = find_eigenvalues(spec, e_lo, e_hi, level + 1);
            if (scan.energies.size() <= level) {
                std::ostringstream os;
                os << "level " << level << " not found in [" << e_lo << ", " << e_hi << "]";
                throw ContractViolation(os.str());
            }
            return match_coefficients(spec, scan.energies[level], order_max > 0);
        } catch (const Error& e) {
            throw StageError("S2 eigenvalue", e);
        }
    }();
    return run_series(spec, pert, std::move(state), order_max);
}

}  // namespace pwmatch
