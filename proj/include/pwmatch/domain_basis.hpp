#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <vector>

#include "pwmatch/errors.hpp"
#include "pwmatch/potential.hpp"
#include "pwmatch/power_series.hpp"
#include "pwmatch/trig_poly.hpp"

namespace pwmatch {

/// Where a domain sits: anchor L_j, the double interval (L_{j-1}, L_{j+1})
/// and the intervals covered by its left and right pieces.
///
/// Domains j = 1..N are anchored at the interior breakpoints.  A box with
/// no interior breakpoint gets one domain (index 0) anchored at the left
/// wall whose left piece has zero length.
struct DomainLayout {
    std::size_t index;
    std::size_t left_interval;
    std::size_t right_interval;
    double anchor;
    double left_end;
    double right_end;
};

inline std::vector<DomainLayout> domain_layout(const PotentialSpec& spec) {
    const auto& L = spec.breakpoints;
    const std::size_t n = spec.interior_count();
    if (n == 0) return {DomainLayout{0, 0, 0, L[0], L[0], L[1]}};
    std::vector<DomainLayout> out;
    out.reserve(n);
    for (std::size_t j = 1; j <= n; ++j) out.push_back({j, j - 1, j, L[j], L[j - 1], L[j + 1]});
    return out;
}

/// Cosine-like C_j and sine-like S_j on a double interval, each split
/// into the piece left of the anchor and the piece right of it.
template <class Piece>
struct DomainBasis {
    DomainLayout layout;
    Piece cos_left;
    Piece cos_right;
    Piece sin_left;
    Piece sin_right;
    double cos_at_left = 0.0;
    double cos_at_right = 0.0;
    double sin_at_left = 0.0;
    double sin_at_right = 0.0;

    DomainBasis(DomainLayout l, Piece cl, Piece cr, Piece sl, Piece sr)
        : layout(l), cos_left(std::move(cl)), cos_right(std::move(cr)), sin_left(std::move(sl)),
          sin_right(std::move(sr)) {
        cos_at_left = cos_left.eval(layout.left_end);
        cos_at_right = cos_right.eval(layout.right_end);
        sin_at_left = sin_left.eval(layout.left_end);
        sin_at_right = sin_right.eval(layout.right_end);
    }

    double anchor() const noexcept { return layout.anchor; }

    const Piece& cos_piece(double x) const { return x < layout.anchor ? cos_left : cos_right; }
    const Piece& sin_piece(double x) const { return x < layout.anchor ? sin_left : sin_right; }

    double cos_value(double x) const { return cos_piece(x).eval(x); }
    double sin_value(double x) const { return sin_piece(x).eval(x); }
    double cos_deriv(double x) const { return cos_piece(x).eval_deriv(x); }
    double sin_deriv(double x) const { return sin_piece(x).eval_deriv(x); }

    double wronskian(double x) const {
        return cos_value(x) * sin_deriv(x) - cos_deriv(x) * sin_value(x);
    }
};

namespace detail {

inline DomainBasis<TrigPoly> closed_form_basis(const PotentialSpec& spec, double energy,
                                               const DomainLayout& l, double beta_floor) {
    const cplx bl = local_offset(spec, l.left_interval, energy, beta_floor);
    const cplx br = local_offset(spec, l.right_interval, energy, beta_floor);
    return DomainBasis<TrigPoly>(l, TrigPoly::cosine(l.anchor, bl), TrigPoly::cosine(l.anchor, br),
                                 TrigPoly::unit_sine(l.anchor, bl),
                                 TrigPoly::unit_sine(l.anchor, br));
}

}  // namespace detail

/// Closed-form local basis of domain j (1..N): cos b(x-L_j) and b^{-1} sin b(x-L_j)
/// with the frequency of the interval on each side.
inline DomainBasis<TrigPoly> build_domain_basis(const PotentialSpec& spec, double energy,
                                                std::size_t j,
                                                double beta_floor = kDefaultBetaFloor) {
    if (j < 1 || j > spec.interior_count()) {
        throw ContractViolation("build_domain_basis: domain index must lie in 1..N");
    }
    if (!spec.is_piecewise_constant()) {
        throw ContractViolation(
            "build_domain_basis: closed form needs a piecewise-constant potential; "
            "use series_local_basis");
    }
    return detail::closed_form_basis(spec, energy, domain_layout(spec)[j - 1], beta_floor);
}

/// All closed-form domain bases, including the virtual wall-anchored domain when N = 0.
inline std::vector<DomainBasis<TrigPoly>> closed_form_domains(
    const PotentialSpec& spec, double energy, double beta_floor = kDefaultBetaFloor) {
    std::vector<DomainBasis<TrigPoly>> out;
    for (const auto& l : domain_layout(spec)) {
        out.push_back(detail::closed_form_basis(spec, energy, l, beta_floor));
    }
    return out;
}

inline constexpr std::size_t kSeriesMaxOrder = 600;

/// Smallest accepted truncation for the series backend.
inline std::size_t series_min_order(const PotentialSpec& spec) {
    std::size_t deg = 0;
    for (const auto& w : spec.zero_order_polys) deg = std::max(deg, w.empty() ? 0 : w.size() - 1);
    return 2 * (deg + 2);
}

namespace detail {

/// Coefficients of V - E on interval i in powers of (x - anchor).
inline std::vector<double> local_coefficients(const PotentialSpec& spec, std::size_t interval,
                                              double anchor, double energy) {
    auto w = shift_polynomial(spec.interval_polynomial(interval),
                              anchor - spec.breakpoints[interval]);
    w[0] -= energy;
    return w;
}

inline DomainBasis<PowerSeries> series_basis(const PotentialSpec& spec, double energy,
                                             const DomainLayout& l, std::size_t order) {
    if (order < series_min_order(spec)) {
        std::ostringstream os;
        os << "series_local_basis: truncation order " << order << " is below the minimum "
           << series_min_order(spec);
        throw TruncationError(os.str(), std::numeric_limits<double>::infinity());
    }
    const auto wl = local_coefficients(spec, l.left_interval, l.anchor, energy);
    const auto wr = local_coefficients(spec, l.right_interval, l.anchor, energy);
    auto build = [&](std::size_t m) {
        return DomainBasis<PowerSeries>(l, PowerSeries::solve(l.anchor, wl, 1.0, 0.0, m),
                                        PowerSeries::solve(l.anchor, wr, 1.0, 0.0, m),
                                        PowerSeries::solve(l.anchor, wl, 0.0, 1.0, m),
                                        PowerSeries::solve(l.anchor, wr, 0.0, 1.0, m));
    };
    auto basis = build(order);
    const auto check = build(order + 10);
    const double diffs[] = {
        std::abs(basis.cos_at_left - check.cos_at_left) / std::max(1.0, std::abs(check.cos_at_left)),
        std::abs(basis.cos_at_right - check.cos_at_right) /
            std::max(1.0, std::abs(check.cos_at_right)),
        std::abs(basis.sin_at_left - check.sin_at_left) / std::max(1.0, std::abs(check.sin_at_left)),
        std::abs(basis.sin_at_right - check.sin_at_right) /
            std::max(1.0, std::abs(check.sin_at_right))};
    const double worst = *std::max_element(std::begin(diffs), std::end(diffs));
    if (!(worst <= 1e-10)) {
        std::ostringstream os;
        os << "series_local_basis: boundary values not converged at order " << order
           << " (change " << worst << " against order " << order + 10 << ")";
        throw TruncationError(os.str(), worst);
    }
    return basis;
}

}  // namespace detail

/// Truncated Taylor-series basis of domain j for a piecewise-polynomial potential.
inline DomainBasis<PowerSeries> series_local_basis(const PotentialSpec& spec, double energy,
                                                   std::size_t j, std::size_t order) {
    if (j < 1 || j > spec.interior_count()) {
        throw ContractViolation("series_local_basis: domain index must lie in 1..N");
    }
    return detail::series_basis(spec, energy, domain_layout(spec)[j - 1], order);
}

/// Series bases for every domain; the truncation grows until converged.
inline std::vector<DomainBasis<PowerSeries>> series_domains(const PotentialSpec& spec,
                                                            double energy) {
    std::vector<DomainBasis<PowerSeries>> out;
    for (const auto& l : domain_layout(spec)) {
        std::size_t order = std::max<std::size_t>(30, series_min_order(spec));
        for (;;) {
            try {
                out.push_back(detail::series_basis(spec, energy, l, order));
                break;
            } catch (const TruncationError&) {
                if (order >= kSeriesMaxOrder) throw;
                order = std::min(kSeriesMaxOrder, order + 30);
            }
        }
    }
    return out;
}

}  // namespace pwmatch
