#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "pwmatch/errors.hpp"

namespace pwmatch {

using cplx = std::complex<double>;

inline constexpr double kDefaultBetaFloor = 1e-8;
inline constexpr double kRealityTolerance = 1e-8;

/// Local function  f(x) = sum_k (x-a)^k [ p_k cos b(x-a) + q_k sin b(x-a) ].
///
/// The frequency b is real on classically allowed pieces and purely
/// imaginary under a barrier; in the latter case the sine coefficients of
/// a real function are purely imaginary, so one complex code path covers
/// both trigonometric and hyperbolic pieces.
class TrigPoly {
public:
    TrigPoly(double anchor, cplx frequency, std::vector<cplx> cos_coeffs,
             std::vector<cplx> sin_coeffs, double beta_floor = kDefaultBetaFloor)
        : anchor_(anchor), beta_(frequency), cos_(std::move(cos_coeffs)),
          sin_(std::move(sin_coeffs)) {
        if (cos_.empty() || cos_.size() != sin_.size()) {
            throw ContractViolation("TrigPoly: cosine and sine coefficient sequences must be "
                                    "non-empty and of equal length");
        }
        if (!(std::abs(beta_) > beta_floor)) {
            std::ostringstream os;
            os << "TrigPoly: |frequency| = " << std::abs(beta_) << " is below the degeneracy floor "
               << beta_floor;
            throw DegenerateFrequency(os.str());
        }
    }

    static TrigPoly zero(double anchor, cplx frequency, std::size_t degree = 0) {
        return TrigPoly(anchor, frequency, std::vector<cplx>(degree + 1),
                        std::vector<cplx>(degree + 1));
    }

    /// cos b(x-a)
    static TrigPoly cosine(double anchor, cplx frequency) {
        return TrigPoly(anchor, frequency, {cplx(1.0)}, {cplx(0.0)});
    }

    /// b^{-1} sin b(x-a), the unit-slope sine solution
    static TrigPoly unit_sine(double anchor, cplx frequency) {
        return TrigPoly(anchor, frequency, {cplx(0.0)}, {1.0 / frequency});
    }

    /// (x-a)^k [p cos + q sin]
    static TrigPoly monomial(double anchor, cplx frequency, std::size_t k, cplx p, cplx q) {
        auto t = zero(anchor, frequency, k);
        t.cos_[k] = p;
        t.sin_[k] = q;
        return t;
    }

    double anchor() const noexcept { return anchor_; }
    cplx frequency() const noexcept { return beta_; }
    std::size_t degree() const noexcept { return cos_.size() - 1; }
    std::span<const cplx> cos_coeffs() const noexcept { return cos_; }
    std::span<const cplx> sin_coeffs() const noexcept { return sin_; }

    cplx cos_coeff(std::size_t k) const noexcept { return k < cos_.size() ? cos_[k] : cplx(0.0); }
    cplx sin_coeff(std::size_t k) const noexcept { return k < sin_.size() ? sin_[k] : cplx(0.0); }

    cplx value_complex(double x) const {
        const double t = x - anchor_;
        const cplx arg = beta_ * t;
        return horner(cos_, t) * std::cos(arg) + horner(sin_, t) * std::sin(arg);
    }

    cplx deriv_complex(double x) const { return derivative().value_complex(x); }

    /// Real value at x; throws InternalConsistency if the imaginary residue is not negligible.
    double eval(double x) const { return checked_real(x, false); }
    double eval_deriv(double x) const { return derivative().checked_real(x, true); }

    /// Coefficients of d/dx: p'_k = (k+1)p_{k+1} + b q_k,  q'_k = (k+1)q_{k+1} - b p_k.
    TrigPoly derivative() const {
        const std::size_t n = cos_.size();
        std::vector<cplx> p(n), q(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double up = static_cast<double>(k + 1);
            p[k] = beta_ * sin_[k] + (k + 1 < n ? up * cos_[k + 1] : cplx(0.0));
            q[k] = -beta_ * cos_[k] + (k + 1 < n ? up * sin_[k + 1] : cplx(0.0));
        }
        return TrigPoly(anchor_, beta_, std::move(p), std::move(q), 0.0);
    }

    bool is_zero() const noexcept {
        auto nz = [](cplx c) { return c != cplx(0.0); };
        return std::none_of(cos_.begin(), cos_.end(), nz) &&
               std::none_of(sin_.begin(), sin_.end(), nz);
    }

    /// Same function with trailing all-zero degrees removed.
    TrigPoly trimmed() const {
        std::size_t n = cos_.size();
        while (n > 1 && cos_[n - 1] == cplx(0.0) && sin_[n - 1] == cplx(0.0)) --n;
        return TrigPoly(anchor_, beta_, {cos_.begin(), cos_.begin() + static_cast<long>(n)},
                        {sin_.begin(), sin_.begin() + static_cast<long>(n)}, 0.0);
    }

    bool compatible_with(const TrigPoly& o) const noexcept {
        const double scale = std::max(1.0, std::abs(beta_));
        return anchor_ == o.anchor_ && std::abs(beta_ - o.beta_) <= 1e-14 * scale;
    }

    TrigPoly& operator+=(const TrigPoly& o) { return accumulate(o, cplx(1.0)); }
    TrigPoly& operator-=(const TrigPoly& o) { return accumulate(o, cplx(-1.0)); }

    TrigPoly& operator*=(cplx s) {
        for (auto& c : cos_) c *= s;
        for (auto& c : sin_) c *= s;
        return *this;
    }

    /// this += s * o
    TrigPoly& accumulate(const TrigPoly& o, cplx s) {
        if (!compatible_with(o)) {
            throw ContractViolation("TrigPoly: cannot combine pieces with different anchor or frequency");
        }
        if (o.cos_.size() > cos_.size()) {
            cos_.resize(o.cos_.size());
            sin_.resize(o.sin_.size());
        }
        for (std::size_t k = 0; k < o.cos_.size(); ++k) {
            cos_[k] += s * o.cos_[k];
            sin_[k] += s * o.sin_[k];
        }
        return *this;
    }

    friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
    friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
    friend TrigPoly operator*(TrigPoly a, cplx s) { return a *= s; }
    friend TrigPoly operator*(cplx s, TrigPoly a) { return a *= s; }
    friend TrigPoly operator*(TrigPoly a, double s) { return a *= cplx(s); }
    friend TrigPoly operator*(double s, TrigPoly a) { return a *= cplx(s); }

    /// Mutable coefficient access for algebra routines.
    std::vector<cplx>& cos_data() noexcept { return cos_; }
    std::vector<cplx>& sin_data() noexcept { return sin_; }

private:
    static cplx horner(const std::vector<cplx>& c, double t) {
        cplx acc(0.0);
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
        return acc;
    }

    double checked_real(double x, bool is_derivative) const {
        const double t = x - anchor_;
        const cplx arg = beta_ * t;
        const cplx c = std::cos(arg);
        const cplx s = std::sin(arg);
        const cplx v = horner(cos_, t) * c + horner(sin_, t) * s;
        // termwise magnitude, so cancellation between degrees does not trip the check
        double scale = 0.0, tk = 1.0;
        for (std::size_t k = 0; k < cos_.size(); ++k, tk *= std::abs(t)) {
            scale += tk * (std::abs(cos_[k] * c) + std::abs(sin_[k] * s));
        }
        if (std::abs(v.imag()) > kRealityTolerance * scale + 1e-300) {
            std::ostringstream os;
            os << "TrigPoly: " << (is_derivative ? "derivative" : "value") << " at x = " << x
               << " has imaginary part " << v.imag() << " (scale " << scale << ")";
            throw InternalConsistency(os.str());
        }
        return v.real();
    }

    double anchor_;
    cplx beta_;
    std::vector<cplx> cos_;
    std::vector<cplx> sin_;
};

/// Re-expand a polynomial given in powers of x into powers of (x - a).
inline std::vector<double> shift_polynomial(std::span<const double> coeffs, double a) {
    std::vector<double> out(coeffs.begin(), coeffs.end());
    // repeated synthetic division (Taylor shift)
    const std::size_t n = out.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t k = n - 1; k > i; --k) out[k - 1] += a * out[k];
    }
    return out;
}

/// Horner evaluation of sum_k c_k t^k.
inline double eval_polynomial(std::span<const double> coeffs, double t) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
    return acc;
}

/// Pointwise product of f with a real polynomial in powers of (x - f.anchor()).
inline TrigPoly mul_polynomial(const TrigPoly& f, std::span<const double> poly) {
    if (poly.empty()) return TrigPoly::zero(f.anchor(), f.frequency(), f.degree());
    const std::size_t n = f.degree() + poly.size();
    std::vector<cplx> p(n), q(n);
    const auto fc = f.cos_coeffs();
    const auto fs = f.sin_coeffs();
    for (std::size_t i = 0; i < fc.size(); ++i) {
        for (std::size_t j = 0; j < poly.size(); ++j) {
            p[i + j] += fc[i] * poly[j];
            q[i + j] += fs[i] * poly[j];
        }
    }
    return TrigPoly(f.anchor(), f.frequency(), std::move(p), std::move(q), 0.0);
}

}  // namespace pwmatch
