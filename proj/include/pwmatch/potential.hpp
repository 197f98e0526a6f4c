#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "pwmatch/errors.hpp"
#include "pwmatch/trig_poly.hpp"

namespace pwmatch {

/// Unperturbed potential on the box (L_0, L_{N+1}) with Dirichlet walls.
///
/// Interval i = (L_i, L_{i+1}), i = 0..N, carries the height H_i.  When
/// zero_order_polys is non-empty, interval i additionally carries
/// sum_l w_l (x - L_i)^l on top of H_i and only the power-series local
/// basis can be used.
struct PotentialSpec {
    std::vector<double> breakpoints;
    std::vector<double> heights;
    std::vector<std::vector<double>> zero_order_polys;

    static PotentialSpec make(std::vector<double> breakpoints, std::vector<double> heights,
                              std::vector<std::vector<double>> zero_order_polys = {}) {
        PotentialSpec s{std::move(breakpoints), std::move(heights), std::move(zero_order_polys)};
        s.validate();
        return s;
    }

    void validate() const {
        if (breakpoints.size() < 2) {
            throw SchemaError("breakpoints", "need at least the two outer walls");
        }
        for (std::size_t i = 0; i < breakpoints.size(); ++i) {
            if (!std::isfinite(breakpoints[i])) {
                throw SchemaError("breakpoints[" + std::to_string(i) + "]", "not a finite number");
            }
            if (i > 0 && !(breakpoints[i] > breakpoints[i - 1])) {
                throw SchemaError("breakpoints[" + std::to_string(i) + "]",
                                  "breakpoints must be strictly increasing");
            }
        }
        if (heights.size() != breakpoints.size() - 1) {
            std::ostringstream os;
            os << "expected " << breakpoints.size() - 1 << " entries (one per interval), got "
               << heights.size();
            throw SchemaError("heights", os.str());
        }
        for (std::size_t i = 0; i < heights.size(); ++i) {
            if (!std::isfinite(heights[i])) {
                throw SchemaError("heights[" + std::to_string(i) + "]", "not a finite number");
            }
        }
        if (!zero_order_polys.empty()) {
            if (zero_order_polys.size() != heights.size()) {
                throw SchemaError("zero_order_polys", "expected one polynomial per interval");
            }
            for (std::size_t i = 0; i < zero_order_polys.size(); ++i) {
                for (std::size_t l = 0; l < zero_order_polys[i].size(); ++l) {
                    if (!std::isfinite(zero_order_polys[i][l])) {
                        throw SchemaError("zero_order_polys[" + std::to_string(i) + "][" +
                                              std::to_string(l) + "]",
                                          "not a finite number");
                    }
                }
            }
        }
    }

    /// N, the number of interior breakpoints.
    std::size_t interior_count() const noexcept { return breakpoints.size() - 2; }
    std::size_t interval_count() const noexcept { return heights.size(); }
    double left_wall() const noexcept { return breakpoints.front(); }
    double right_wall() const noexcept { return breakpoints.back(); }
    double width() const noexcept { return right_wall() - left_wall(); }

    bool is_piecewise_constant() const noexcept {
        return std::all_of(zero_order_polys.begin(), zero_order_polys.end(), [](const auto& w) {
            return std::all_of(w.begin(), w.end(), [](double c) { return c == 0.0; });
        });
    }

    double min_height() const { return *std::min_element(heights.begin(), heights.end()); }
    double max_height() const { return *std::max_element(heights.begin(), heights.end()); }

    /// Interval containing x; points on an interior breakpoint belong to the right interval.
    std::size_t interval_of(double x) const noexcept {
        const auto it = std::upper_bound(breakpoints.begin() + 1, breakpoints.end() - 1, x);
        return static_cast<std::size_t>(it - (breakpoints.begin() + 1));
    }

    /// Polynomial of interval i in powers of (x - L_i), including the height.
    std::vector<double> interval_polynomial(std::size_t i) const {
        std::vector<double> w = zero_order_polys.empty() ? std::vector<double>{}
                                                         : zero_order_polys[i];
        if (w.empty()) w.push_back(0.0);
        w[0] += heights[i];
        return w;
    }

    double value(double x) const {
        const std::size_t i = interval_of(x);
        if (zero_order_polys.empty()) return heights[i];
        return heights[i] + eval_polynomial(zero_order_polys[i], x - breakpoints[i]);
    }
};

/// Perturbation V1 as one real polynomial (in powers of x) per interval.
struct PerturbationSpec {
    std::vector<std::vector<double>> interval_polys;
    double coupling = 1.0;

    static PerturbationSpec global(std::vector<double> poly, std::size_t intervals,
                                   double coupling = 1.0) {
        PerturbationSpec p{std::vector<std::vector<double>>(intervals, poly), coupling};
        return p;
    }

    void validate(std::size_t intervals) const {
        if (interval_polys.size() != intervals) {
            std::ostringstream os;
            os << "expected " << intervals << " polynomials (one per interval), got "
               << interval_polys.size();
            throw SchemaError("perturbation.interval_polys", os.str());
        }
        bool any_nonzero = false;
        for (std::size_t i = 0; i < interval_polys.size(); ++i) {
            for (std::size_t l = 0; l < interval_polys[i].size(); ++l) {
                const double c = interval_polys[i][l];
                if (!std::isfinite(c)) {
                    throw SchemaError("perturbation.interval_polys[" + std::to_string(i) + "][" +
                                          std::to_string(l) + "]",
                                      "not a finite number");
                }
                any_nonzero = any_nonzero || c != 0.0;
            }
        }
        if (!any_nonzero) throw SchemaError("perturbation", "all interval polynomials are zero");
        if (!std::isfinite(coupling)) throw SchemaError("perturbation.coupling", "not finite");
    }

    std::size_t max_degree() const noexcept {
        std::size_t d = 0;
        for (const auto& p : interval_polys) d = std::max(d, p.empty() ? 0 : p.size() - 1);
        return d;
    }

    double value(const PotentialSpec& spec, double x) const {
        return eval_polynomial(interval_polys[spec.interval_of(x)], x);
    }
};

/// beta_i = sqrt(E - H_i) on the principal branch: real and positive, or i times positive.
inline cplx local_offset(const PotentialSpec& spec, std::size_t interval, double energy,
                         double beta_floor = kDefaultBetaFloor) {
    const double d = energy - spec.heights.at(interval);
    if (!(std::abs(d) > beta_floor * beta_floor)) {
        std::ostringstream os;
        os.precision(17);
        os << "energy " << energy << " coincides with the height " << spec.heights[interval]
           << " of interval " << interval
           << "; shift all heights by a common constant (gauge shift) or move the energy";
        throw DegenerateEnergy(os.str());
    }
    return d > 0.0 ? cplx(std::sqrt(d), 0.0) : cplx(0.0, std::sqrt(-d));
}

}  // namespace pwmatch
