#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pwmatch/errors.hpp"
#include "pwmatch/potential.hpp"
#include "pwmatch/quadrature.hpp"

namespace pwmatch {

/// Three-point finite-difference Hamiltonian -d²/dx² + V on M interior nodes
/// x_i = L_0 + i h, h = (L_{N+1} - L_0)/(M+1), with Dirichlet truncation.
///
/// The node potential is the average of V against the hat function of node i
/// (support [x_i - h, x_i + h]), i.e. mass-lumped linear finite elements with
/// exact potential integrals.  A step anywhere between nodes then enters the
/// eigenvalue error only at O(h³), so grids h and h/2 extrapolate cleanly.
class GridHamiltonian {
public:
    GridHamiltonian(const PotentialSpec& spec, const PerturbationSpec* pert, double coupling,
                    std::size_t m)
        : m_(m), h_(spec.width() / static_cast<double>(m + 1)), x0_(spec.left_wall()), v_(m) {
        if (m < 1) throw ContractViolation("GridHamiltonian: need at least one node");
        for (std::size_t i = 0; i < m; ++i) {
            const double x = node(i);
            v_[i] = hat_average(spec, pert, coupling, x, h_);
        }
    }

    std::size_t size() const noexcept { return m_; }
    double spacing() const noexcept { return h_; }
    double node(std::size_t i) const noexcept { return x0_ + h_ * static_cast<double>(i + 1); }
    std::span<const double> potential() const noexcept { return v_; }

    /// Number of eigenvalues strictly below sigma (Sturm count of the LDL^T pivots).
    std::size_t count_below(double sigma) const {
        // pivot d_i = 1 + e_i of h²(T - sigma); e carries the pivot without cancellation
        const long double h2 = static_cast<long double>(h_) * h_;
        long double ratio = 1.0L;  // e_{i-1} / (1 + e_{i-1}), starts at e_0 = infinity
        std::size_t count = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            long double e = h2 * (static_cast<long double>(v_[i]) - sigma) + ratio;
            long double d = 1.0L + e;
            if (d == 0.0L) {
                d = -std::numeric_limits<long double>::epsilon();
                e = d - 1.0L;
            }
            if (d < 0.0L) ++count;
            ratio = e / d;
        }
        return count;
    }

    /// Eigenvalue number n (0-based) by bisection on the Sturm count.
    double eigenvalue(std::size_t n) const {
        double lo = *std::min_element(v_.begin(), v_.end());
        double hi = *std::max_element(v_.begin(), v_.end()) + 4.0 / (h_ * h_);
        for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() *
                                                   std::max(std::abs(lo), std::abs(hi));
             ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (count_below(mid) > n) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return 0.5 * (lo + hi);
    }

    /// Eigenvector for eigenvalue sigma by inverse iteration, normalized to unit L2 norm.
    std::vector<double> eigenvector(double sigma) const {
        const double shift = sigma * (1.0 + 1e-13) + 1e-13;
        const double inv_h2 = 1.0 / (h_ * h_);
        std::vector<double> x(m_, 1.0), diag(m_), rhs(m_);
        for (int it = 0; it < 3; ++it) {
            // Thomas algorithm on the shifted tridiagonal system
            for (std::size_t i = 0; i < m_; ++i) diag[i] = 2.0 * inv_h2 + v_[i] - shift;
            rhs = x;
            for (std::size_t i = 1; i < m_; ++i) {
                const double w = -inv_h2 / diag[i - 1];
                diag[i] -= w * -inv_h2;
                rhs[i] -= w * rhs[i - 1];
            }
            x[m_ - 1] = rhs[m_ - 1] / diag[m_ - 1];
            for (std::size_t i = m_ - 1; i-- > 0;) x[i] = (rhs[i] + inv_h2 * x[i + 1]) / diag[i];
            double norm = 0.0;
            for (double c : x) norm += c * c;
            norm = std::sqrt(norm * h_);
            for (double& c : x) c /= norm;
        }
        const auto big = std::max_element(x.begin(), x.end(),
                                          [](double a, double b) { return std::abs(a) < std::abs(b); });
        if (*big < 0.0) {
            for (double& c : x) c = -c;
        }
        return x;
    }

private:
    /// Integral over s in [a, b] of sum_l c_l s^l times (1 + slope s).
    static double weighted_integral(std::span<const double> c, double slope, double a, double b) {
        double s = 0.0, pa = a, pb = b;
        for (std::size_t l = 0; l < c.size(); ++l) {
            const double n = static_cast<double>(l + 1);
            s += c[l] * ((pb - pa) / n + slope * (pb * b - pa * a) / (n + 1.0));
            pa *= a;
            pb *= b;
        }
        return s;
    }

    static double hat_average(const PotentialSpec& spec, const PerturbationSpec* pert,
                              double coupling, double x, double h) {
        const auto& L = spec.breakpoints;
        double total = 0.0;
        for (std::size_t i = 0; i < spec.interval_count(); ++i) {
            const double lo = std::max(x - h, L[i]);
            const double hi = std::min(x + h, L[i + 1]);
            if (!(hi > lo)) continue;
            // polynomials re-expanded around the node so the weight stays well scaled
            auto v = shift_polynomial(spec.interval_polynomial(i), x - L[i]);
            if (pert) {
                const auto w = shift_polynomial(pert->interval_polys[i], x);
                if (w.size() > v.size()) v.resize(w.size(), 0.0);
                for (std::size_t l = 0; l < w.size(); ++l) v[l] += coupling * w[l];
            }
            const double a = lo - x, b = hi - x;
            if (a < 0.0) total += weighted_integral(v, 1.0 / h, a, std::min(b, 0.0));
            if (b > 0.0) total += weighted_integral(v, -1.0 / h, std::max(a, 0.0), b);
        }
        return total / h;
    }

    std::size_t m_;
    double h_;
    double x0_;
    std::vector<double> v_;
};

struct FdResult {
    std::vector<double> energies;  ///< Richardson values (4 E_2M - E_M) / 3
    std::vector<double> errors;    ///< |E_M - E_2M| / 3
    std::vector<double> coarse;    ///< E_M
    std::vector<double> fine;      ///< E_2M
    bool partial = false;
};

/// Lowest `count` eigenvalues of -d²/dx² + V0 + coupling V1 from grids with M and 2M+1
/// nodes (spacings h and h/2), Richardson-extrapolated.
inline FdResult fd_eigenvalues(const PotentialSpec& spec, const PerturbationSpec* pert,
                               double coupling, std::size_t m, std::size_t count) {
    if (m < 1000) throw ContractViolation("fd_eigenvalues: grid size must be at least 1000");
    const GridHamiltonian coarse(spec, pert, coupling, m);
    const GridHamiltonian fine(spec, pert, coupling, 2 * m + 1);
    FdResult out;
    const std::size_t n = std::min(count, m);
    out.partial = n < count;
    for (std::size_t i = 0; i < n; ++i) {
        const double ec = coarse.eigenvalue(i);
        const double ef = fine.eigenvalue(i);
        out.coarse.push_back(ec);
        out.fine.push_back(ef);
        out.energies.push_back((4.0 * ef - ec) / 3.0);
        out.errors.push_back(std::abs(ec - ef) / 3.0);
    }
    return out;
}

inline FdResult fd_eigenvalues(const PotentialSpec& spec, std::size_t m, std::size_t count) {
    return fd_eigenvalues(spec, nullptr, 0.0, m, count);
}

/// <psi0|V1|psi0> / <psi0|psi0> by adaptive quadrature, interval by interval.
template <class State>
double rs_first_order(const PotentialSpec& spec, const State& state, const PerturbationSpec& pert) {
    const auto& L = spec.breakpoints;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < spec.interval_count(); ++i) {
        const auto& v = pert.interval_polys[i];
        num += integrate(
            [&](double x) {
                const double p = state.value(x);
                return p * p * eval_polynomial(v, x);
            },
            L[i], L[i + 1]);
        den += integrate(
            [&](double x) {
                const double p = state.value(x);
                return p * p;
            },
            L[i], L[i + 1]);
    }
    return num / den;
}

}  // namespace pwmatch
