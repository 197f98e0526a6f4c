#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pwmatch/domain_basis.hpp"
#include "pwmatch/errors.hpp"
#include "pwmatch/potential.hpp"

namespace pwmatch {

/// Homogeneous matching system in the unknowns (c(1), d(1), ..., c(N), d(N)).
/// Row 2j is domain j+1 evaluated at its left end, row 2j+1 at its right end:
///   c(j) C_j(L_{j-1}) + d(j) S_j(L_{j-1}) - c(j-1) = 0,
///   c(j) C_j(L_{j+1}) + d(j) S_j(L_{j+1}) - c(j+1) = 0,   c(0) = c(N+1) = 0.
template <class Piece>
Eigen::MatrixXd assemble_matching_matrix(const std::vector<DomainBasis<Piece>>& domains) {
    const auto n = static_cast<Eigen::Index>(domains.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& d = domains[static_cast<std::size_t>(j)];
        a(2 * j, 2 * j) = d.cos_at_left;
        a(2 * j, 2 * j + 1) = d.sin_at_left;
        if (j > 0) a(2 * j, 2 * (j - 1)) = -1.0;
        a(2 * j + 1, 2 * j) = d.cos_at_right;
        a(2 * j + 1, 2 * j + 1) = d.sin_at_right;
        if (j + 1 < n) a(2 * j + 1, 2 * (j + 1)) = -1.0;
    }
    return a;
}

/// Call f with the domain bases of the backend appropriate for the potential.
template <class F>
decltype(auto) with_domains(const PotentialSpec& spec, double energy, F&& f,
                            double beta_floor = kDefaultBetaFloor) {
    if (spec.is_piecewise_constant()) return f(closed_form_domains(spec, energy, beta_floor));
    return f(series_domains(spec, energy));
}

inline Eigen::MatrixXd matching_matrix(const PotentialSpec& spec, double energy,
                                       double beta_floor = kDefaultBetaFloor) {
    if (spec.interior_count() == 0) {
        throw ContractViolation(
            "matching_matrix: needs at least one interior breakpoint; a plain box reduces to "
            "the wall condition S(L_1) = 0 (see secular_determinant)");
    }
    return with_domains(
        spec, energy, [](const auto& d) { return assemble_matching_matrix(d); }, beta_floor);
}

/// Determinant of the matching system; for N = 0 the sine solution from L_0 evaluated at L_1.
inline double secular_determinant(const PotentialSpec& spec, double energy,
                                  double beta_floor = kDefaultBetaFloor) {
    return with_domains(
        spec, energy,
        [](const auto& d) {
            if (d.size() == 1 && d.front().layout.index == 0) return d.front().sin_at_right;
            return assemble_matching_matrix(d).partialPivLu().determinant();
        },
        beta_floor);
}

/// Determinant divided by prod_{i=1}^{N-1} S_i(L_{i+1}).
///
/// The raw determinant also vanishes where an interior interval has a
/// Dirichlet resonance (S_i(L_{i+1}) = 0) even though no bound state
/// exists there; the quotient keeps only the physical zeros.  Returns
/// nullopt when a divisor is too close to zero to trust.
inline std::optional<double> reduced_determinant(const PotentialSpec& spec, double energy,
                                                 double beta_floor = kDefaultBetaFloor) {
    return with_domains(
        spec, energy,
        [](const auto& d) -> std::optional<double> {
            if (d.size() == 1 && d.front().layout.index == 0) return d.front().sin_at_right;
            double value = assemble_matching_matrix(d).partialPivLu().determinant();
            for (std::size_t i = 0; i + 1 < d.size(); ++i) {
                const double s = d[i].sin_at_right;
                const double span = d[i].layout.right_end - d[i].layout.anchor;
                if (!(std::abs(s) > 1e-13 * span)) return std::nullopt;
                value /= s;
            }
            return value;
        },
        beta_floor);
}

struct ScanOptions {
    double relative_step = 0.002;     ///< momentum grid step as a fraction of the window
    double energy_tolerance = 1e-12;  ///< bisection stops below this bracket width
    double beta_floor = kDefaultBetaFloor;
};

struct EigenScan {
    std::vector<double> energies;
    std::vector<double> residuals;  ///< |reduced determinant| at the root over the bracket scale
    bool partial = false;
    std::vector<std::string> diagnostics;
};

/// Momentum variable of the scans, k = sqrt(E - min_j H_j).
inline double momentum_of(const PotentialSpec& spec, double energy) {
    return std::sqrt(std::max(0.0, energy - spec.min_height()));
}

inline double energy_of(const PotentialSpec& spec, double k) { return spec.min_height() + k * k; }

/// Lowest `count` eigenvalues in [e_lo, e_hi], ascending.
inline EigenScan find_eigenvalues(const PotentialSpec& spec, double e_lo, double e_hi,
                                  std::size_t count, const ScanOptions& opts = {}) {
    if (!(e_lo < e_hi)) throw ContractViolation("find_eigenvalues: need e_lo < e_hi");
    if (count < 1) throw ContractViolation("find_eigenvalues: count must be at least 1");

    EigenScan out;
    const double k_lo = momentum_of(spec, e_lo);
    const double k_hi = momentum_of(spec, e_hi);
    if (!(k_hi > k_lo)) {
        out.partial = true;
        out.diagnostics.push_back("window lies below the lowest interval height; no bound states");
        return out;
    }

    auto evaluate = [&](double e) -> std::optional<double> {
        try {
            return reduced_determinant(spec, e, opts.beta_floor);
        } catch (const DegenerateEnergy&) {
            return std::nullopt;
        }
    };

    const auto steps = static_cast<std::size_t>(std::ceil(1.0 / opts.relative_step));
    const double dk = (k_hi - k_lo) / static_cast<double>(steps);
    std::optional<double> prev_e, prev_f;
    for (std::size_t i = 0; i <= steps && out.energies.size() < count; ++i) {
        const double k = (i == steps) ? k_hi : k_lo + dk * static_cast<double>(i);
        double e = (i == 0) ? std::max(e_lo, energy_of(spec, k))
                            : (i == steps ? e_hi : energy_of(spec, k));
        const auto f = evaluate(e);
        if (!f) {
            std::ostringstream os;
            os.precision(17);
            os << "skipped grid point E = " << e << " (degenerate energy or resonant interval)";
            out.diagnostics.push_back(os.str());
            continue;
        }
        if (*f == 0.0) {
            out.energies.push_back(e);
            out.residuals.push_back(0.0);
            prev_e.reset();
            prev_f.reset();
            continue;
        }
        if (prev_f && std::signbit(*prev_f) != std::signbit(*f)) {
            double lo = *prev_e, hi = e, flo = *prev_f;
            const double scale = std::max(std::abs(*prev_f), std::abs(*f));
            double froot = flo;
            while (hi - lo > std::max(opts.energy_tolerance,
                                      4.0 * std::numeric_limits<double>::epsilon() * std::abs(hi))) {
                const double mid = 0.5 * (lo + hi);
                auto fm = evaluate(mid);
                if (!fm) fm = evaluate(std::nextafter(mid, hi));
                if (!fm) break;
                froot = *fm;
                if (*fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (std::signbit(*fm) == std::signbit(flo)) {
                    lo = mid;
                    flo = *fm;
                } else {
                    hi = mid;
                }
            }
            out.energies.push_back(0.5 * (lo + hi));
            out.residuals.push_back(std::abs(froot) / scale);
        }
        prev_e = e;
        prev_f = f;
    }
    out.partial = out.energies.size() < count;
    return out;
}

/// E^(0) with the matched coefficients c(j) = psi(L_j), d(j) = psi'(L_j) of every domain.
template <class Piece>
struct BasicMatchedState {
    double energy = 0.0;
    std::vector<DomainBasis<Piece>> domains;
    std::vector<double> c;
    std::vector<double> d;
    /// Normalization record: (c, d) has unit Euclidean norm and the component
    /// at sign_index (the first nonzero one) is positive.
    std::size_t sign_index = 0;
    double residual = 0.0;          ///< worst relative row residual of the matching system
    double overlap_mismatch = 0.0;  ///< worst derivative disagreement at interior breakpoints
    bool rescalable = true;         ///< c(j) + d(j) != 0 in every domain

    std::size_t domain_count() const noexcept { return domains.size(); }

    /// Domain whose representation is used on interval i of the non-overlapping cover.
    std::size_t domain_for_interval(std::size_t interval) const noexcept {
        if (domains.size() == 1 && domains.front().layout.index == 0) return 0;
        return interval == 0 ? 0 : interval - 1;
    }

    std::size_t interval_of(double x) const noexcept {
        std::size_t i = 0;
        for (const auto& dom : domains) {
            if (dom.layout.index != 0 && x >= dom.layout.anchor) i = dom.layout.index;
        }
        return i;
    }

    double value(double x) const {
        const auto j = domain_for_interval(interval_of(x));
        return c[j] * domains[j].cos_value(x) + d[j] * domains[j].sin_value(x);
    }

    double deriv(double x) const {
        const auto j = domain_for_interval(interval_of(x));
        return c[j] * domains[j].cos_deriv(x) + d[j] * domains[j].sin_deriv(x);
    }

    /// psi(L_i) for i = 0..N+1 (zero at the walls).
    double value_at_breakpoint(std::size_t i) const {
        if (domains.size() == 1 && domains.front().layout.index == 0) return 0.0;
        if (i == 0 || i > domains.size()) return 0.0;
        return c[i - 1];
    }
};

namespace detail {

/// Null vector of a (numerically) singular square matrix: pin each unknown
/// to 1 in turn, least-squares solve for the rest, keep the pin with the
/// smallest normalized residual.
inline Eigen::VectorXd pinned_null_vector(const Eigen::MatrixXd& a) {
    const Eigen::Index n = a.cols();
    Eigen::VectorXd best;
    double best_res = std::numeric_limits<double>::infinity();
    for (Eigen::Index p = 0; p < n; ++p) {
        Eigen::MatrixXd rest(a.rows(), n - 1);
        for (Eigen::Index c = 0, k = 0; c < n; ++c) {
            if (c != p) rest.col(k++) = a.col(c);
        }
        Eigen::VectorXd v(n);
        v(p) = 1.0;
        if (n > 1) {
            const Eigen::VectorXd y = rest.colPivHouseholderQr().solve(-a.col(p));
            for (Eigen::Index c = 0, k = 0; c < n; ++c) {
                if (c != p) v(c) = y(k++);
            }
        }
        if (!v.allFinite()) continue;
        v.normalize();
        const double res = (a * v).norm();
        if (res < best_res) {
            best_res = res;
            best = v;
        }
    }
    if (best.size() == 0) throw InternalConsistency("null vector extraction failed");
    return best;
}

template <class Piece>
BasicMatchedState<Piece> match_domains(std::vector<DomainBasis<Piece>> domains, double energy,
                                       bool require_rescalable) {
    const Eigen::MatrixXd a = assemble_matching_matrix(domains);
    const Eigen::Index n = a.cols();

    // rank test on the row-equilibrated matrix
    Eigen::MatrixXd eq = a;
    for (Eigen::Index r = 0; r < eq.rows(); ++r) {
        const double m = eq.row(r).cwiseAbs().maxCoeff();
        if (m > 0.0) eq.row(r) /= m;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(eq);
    qr.setThreshold(1e-9);
    if (qr.rank() + 1 < n) {
        std::ostringstream os;
        os << "matching system at E = " << energy << " has a null space of dimension "
           << n - qr.rank() << " (expected 1)";
        throw DegeneracyError(os.str());
    }

    Eigen::VectorXd v = pinned_null_vector(a);
    const double vmax = v.cwiseAbs().maxCoeff();
    Eigen::Index sign_index = 0;
    while (sign_index < n && std::abs(v(sign_index)) <= 1e-12 * vmax) ++sign_index;
    if (v(sign_index) < 0.0) v = -v;

    double residual = 0.0;
    const Eigen::VectorXd av = a * v;
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        residual = std::max(residual, std::abs(av(r)) / std::max(a.row(r).norm(), 1e-300));
    }
    if (!(residual <= 1e-7)) {
        std::ostringstream os;
        os.precision(17);
        os << "match_coefficients: E = " << energy
           << " is not a root of the matching determinant (relative residual " << residual << ")";
        throw ContractViolation(os.str());
    }

    BasicMatchedState<Piece> st;
    st.energy = energy;
    st.sign_index = static_cast<std::size_t>(sign_index);
    st.residual = residual;
    for (Eigen::Index j = 0; j < n / 2; ++j) {
        st.c.push_back(v(2 * j));
        st.d.push_back(v(2 * j + 1));
    }
    st.domains = std::move(domains);

    for (std::size_t j = 0; j + 1 < st.domains.size(); ++j) {
        const double x = st.domains[j + 1].anchor();
        const double from_left =
            st.c[j] * st.domains[j].cos_deriv(x) + st.d[j] * st.domains[j].sin_deriv(x);
        const double scale = std::max({std::abs(st.d[j + 1]), std::abs(st.c[j + 1]), 1e-300});
        st.overlap_mismatch =
            std::max(st.overlap_mismatch, std::abs(from_left - st.d[j + 1]) / scale);
    }

    for (std::size_t j = 0; j < st.c.size(); ++j) {
        if (std::abs(st.c[j] + st.d[j]) < 1e-10) {
            st.rescalable = false;
            if (require_rescalable) {
                std::ostringstream os;
                os << "c(j) + d(j) vanishes in domain " << st.domains[j].layout.index
                   << "; the c+d=1 rescaling of corrections is impossible there";
                throw NormalizationObstruction(os.str());
            }
        }
    }
    return st;
}

}  // namespace detail

using MatchedState = BasicMatchedState<TrigPoly>;
using SeriesMatchedState = BasicMatchedState<PowerSeries>;

/// Null-space extraction at a root E0 of the (closed-form) matching determinant.
inline MatchedState match_coefficients(const PotentialSpec& spec, double e0,
                                       bool require_rescalable = true,
                                       double beta_floor = kDefaultBetaFloor) {
    if (!spec.is_piecewise_constant()) {
        throw ContractViolation(
            "match_coefficients: piecewise-polynomial potentials go through "
            "match_coefficients_series");
    }
    return detail::match_domains(closed_form_domains(spec, e0, beta_floor), e0,
                                 require_rescalable);
}

inline SeriesMatchedState match_coefficients_series(const PotentialSpec& spec, double e0,
                                                    bool require_rescalable = false) {
    return detail::match_domains(series_domains(spec, e0), e0, require_rescalable);
}

}  // namespace pwmatch
