#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "pwmatch/errors.hpp"
#include "pwmatch/trig_poly.hpp"

namespace pwmatch {

using Block = Eigen::Matrix2cd;

/// Matrix of  H = -d²/dx² - b²  on the partitioned basis
/// |k,1> = t^k cos bt, |k,2> = t^k sin bt, truncated at degree K.
///
/// Coefficient vectors are columns ordered (p_0, q_0, p_1, q_1, ...), so
/// the action matrix A maps f to Hf.  Only two block sub-diagonals are
/// nonzero: A(k-1, k) = b_k = 2kb J and A(k-2, k) = c_k = -k(k-1) I,
/// with the generator J = [[0,-1],[1,0]], J² = -I.  The main diagonal is
/// zero and degree 0 spans the kernel.
///
/// The left inverse B has the closed-form blocks
///   B(m, n) = (-1)^{s+1} J^{s+1} (2b)^{-(s+1)} g(m, n),   s = n - m + 1 >= 0,
/// with g = 1/m for n = m-1 and g = (m+1)(m+2)...n otherwise; B·A is the
/// identity on every column of degree >= 1, and B maps a forcing term to
/// the particular solution with no degree-0 component.
class BandedOperator {
public:
    BandedOperator(cplx frequency, std::size_t truncation, double beta_floor = kDefaultBetaFloor)
        : beta_(frequency), K_(truncation) {
        if (!(std::abs(beta_) > beta_floor)) {
            std::ostringstream os;
            os << "BandedOperator: |frequency| = " << std::abs(beta_)
               << " is below the degeneracy floor " << beta_floor;
            throw DegenerateFrequency(os.str());
        }
    }

    cplx frequency() const noexcept { return beta_; }
    std::size_t truncation() const noexcept { return K_; }

    static Block generator() {
        Block j;
        j << 0.0, -1.0, 1.0, 0.0;
        return j;
    }

    Block first_block(std::size_t k) const {
        return (2.0 * static_cast<double>(k)) * beta_ * generator();
    }

    Block second_block(std::size_t k) const {
        const double kk = static_cast<double>(k);
        return -kk * (kk - 1.0) * Block::Identity();
    }

    Eigen::MatrixXcd action_matrix() const {
        const auto n = static_cast<Eigen::Index>(2 * (K_ + 1));
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
        for (std::size_t k = 1; k <= K_; ++k) {
            a.block<2, 2>(2 * static_cast<Eigen::Index>(k - 1), 2 * static_cast<Eigen::Index>(k)) =
                first_block(k);
            if (k >= 2) {
                a.block<2, 2>(2 * static_cast<Eigen::Index>(k - 2),
                              2 * static_cast<Eigen::Index>(k)) = second_block(k);
            }
        }
        return a;
    }

    /// Block of the left inverse mapping source degree n to target degree m.
    Block left_inverse_block(std::size_t m, std::size_t n) const {
        if (m == 0 || n + 1 < m) return Block::Zero();
        const std::size_t s = n + 1 - m;
        double g = 1.0;
        if (s == 0) {
            g = 1.0 / static_cast<double>(m);
        } else {
            for (std::size_t i = m + 1; i <= n; ++i) g *= static_cast<double>(i);
        }
        const cplx scale = inverse_power(s + 1) * g *
                           ((s + 1) % 2 == 0 ? 1.0 : -1.0);
        return scale * generator_power(s + 1);
    }

    Eigen::MatrixXcd left_inverse_matrix() const {
        const auto n = static_cast<Eigen::Index>(2 * (K_ + 1));
        Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, n);
        for (std::size_t m = 1; m <= K_; ++m) {
            for (std::size_t src = m - 1; src <= K_; ++src) {
                b.block<2, 2>(2 * static_cast<Eigen::Index>(m), 2 * static_cast<Eigen::Index>(src)) =
                    left_inverse_block(m, src);
            }
        }
        return b;
    }

private:
    // (2b)^{-e} by repeated multiplication; complex pow goes through exp/log and
    // smears a purely imaginary b into both components
    cplx inverse_power(std::size_t e) const {
        const cplx r = 1.0 / (2.0 * beta_);
        cplx out = 1.0;
        for (std::size_t i = 0; i < e; ++i) out *= r;
        return out;
    }

    static Block generator_power(std::size_t e) {
        switch (e % 4) {
            case 0: return Block::Identity();
            case 1: return generator();
            case 2: return -Block::Identity();
            default: return -generator();
        }
    }

    cplx beta_;
    std::size_t K_;
};

/// H f = -f'' + (V - E) f on a piece whose frequency satisfies b² = E - V.
inline TrigPoly apply_hamiltonian(const TrigPoly& f, double local_offset,
                                  double beta_floor = kDefaultBetaFloor) {
    const cplx b = f.frequency();
    if (!(std::abs(b) > beta_floor)) {
        throw DegenerateFrequency("apply_hamiltonian: frequency below the degeneracy floor");
    }
    if (std::abs(b * b + local_offset) > 1e-10 * std::max(1.0, std::abs(local_offset))) {
        std::ostringstream os;
        os << "apply_hamiltonian: frequency " << b << " does not satisfy b^2 = -(V-E) = "
           << -local_offset;
        throw ContractViolation(os.str());
    }
    const auto p = f.cos_coeffs();
    const auto q = f.sin_coeffs();
    const std::size_t n = p.size();
    const std::size_t out = n > 1 ? n - 1 : 1;
    std::vector<cplx> hp(out), hq(out);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double k1 = static_cast<double>(k + 1);
        const double k12 = k1 * static_cast<double>(k + 2);
        const cplx p2 = k + 2 < n ? p[k + 2] : cplx(0.0);
        const cplx q2 = k + 2 < n ? q[k + 2] : cplx(0.0);
        hp[k] = -k12 * p2 - 2.0 * b * k1 * q[k + 1];
        hq[k] = -k12 * q2 + 2.0 * b * k1 * p[k + 1];
    }
    return TrigPoly(f.anchor(), b, std::move(hp), std::move(hq), 0.0);
}

/// Particular solution of H f = rhs with no degree-0 component, so f(a) = 0 and f'(a) = p_1.
inline TrigPoly particular_solution(const TrigPoly& rhs, double beta_floor = kDefaultBetaFloor) {
    const std::size_t deg = rhs.degree();
    const BandedOperator op(rhs.frequency(), deg + 1, beta_floor);
    std::vector<cplx> p(deg + 2), q(deg + 2);
    const auto rp = rhs.cos_coeffs();
    const auto rq = rhs.sin_coeffs();
    for (std::size_t m = 1; m <= deg + 1; ++m) {
        Eigen::Vector2cd acc = Eigen::Vector2cd::Zero();
        for (std::size_t n = m - 1; n <= deg; ++n) {
            acc += op.left_inverse_block(m, n) * Eigen::Vector2cd(rp[n], rq[n]);
        }
        p[m] = acc(0);
        q[m] = acc(1);
    }
    return TrigPoly(rhs.anchor(), rhs.frequency(), std::move(p), std::move(q), 0.0);
}

/// Solution of H f = rhs with f(a) = value, f'(a) = slope.
inline TrigPoly solve_initial_value(const TrigPoly& rhs, cplx value, cplx slope,
                                    double beta_floor = kDefaultBetaFloor) {
    TrigPoly f = particular_solution(rhs, beta_floor);
    // particular part has f(a) = 0, f'(a) = p_1
    const cplx b = f.frequency();
    auto& p = f.cos_data();
    auto& q = f.sin_data();
    const cplx p1 = p.size() > 1 ? p[1] : cplx(0.0);
    p[0] += value;
    q[0] += (slope - p1) / b;
    return f;
}

}  // namespace pwmatch
