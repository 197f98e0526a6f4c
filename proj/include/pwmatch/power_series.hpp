#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pwmatch/trig_poly.hpp"

namespace pwmatch {

/// Truncated Taylor series  sum_n h_n (x - a)^n  of a local solution.
class PowerSeries {
public:
    PowerSeries(double anchor, std::vector<double> coeffs)
        : anchor_(anchor), coeffs_(std::move(coeffs)) {}

    /// Solution of -psi'' + w(t) psi = 0, t = x - a, with psi(a) = value, psi'(a) = slope.
    /// w holds the coefficients of V - E in powers of t; terms 0..order are kept.
    static PowerSeries solve(double anchor, std::span<const double> w, double value, double slope,
                             std::size_t order) {
        std::vector<double> h(order + 1, 0.0);
        h[0] = value;
        if (order >= 1) h[1] = slope;
        // (n+2)(n+1) h_{n+2} = sum_l w_l h_{n-l}
        for (std::size_t n = 0; n + 2 <= order; ++n) {
            double acc = 0.0;
            for (std::size_t l = 0; l < w.size() && l <= n; ++l) acc += w[l] * h[n - l];
            h[n + 2] = acc / (static_cast<double>(n + 2) * static_cast<double>(n + 1));
        }
        return PowerSeries(anchor, std::move(h));
    }

    double anchor() const noexcept { return anchor_; }
    std::size_t order() const noexcept { return coeffs_.size() - 1; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }

    double eval(double x) const { return eval_polynomial(coeffs_, x - anchor_); }

    double eval_deriv(double x) const {
        const double t = x - anchor_;
        double acc = 0.0;
        for (std::size_t n = coeffs_.size(); n-- > 1;) acc = acc * t + static_cast<double>(n) * coeffs_[n];
        return acc;
    }

    double eval_second(double x) const {
        const double t = x - anchor_;
        double acc = 0.0;
        for (std::size_t n = coeffs_.size(); n-- > 2;) {
            acc = acc * t + static_cast<double>(n) * static_cast<double>(n - 1) * coeffs_[n];
        }
        return acc;
    }

private:
    double anchor_;
    std::vector<double> coeffs_;
};

}  // namespace pwmatch
