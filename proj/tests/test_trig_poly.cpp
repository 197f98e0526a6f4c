#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "pwmatch/banded_operator.hpp"
#include "pwmatch/trig_poly.hpp"

using namespace pwmatch;

namespace {

cplx random_frequency(std::mt19937& rng) {
    std::uniform_real_distribution<double> mag(0.5, 3.0);
    std::bernoulli_distribution imag(0.5);
    const double b = mag(rng);
    return imag(rng) ? cplx(0.0, b) : cplx(b, 0.0);
}

TrigPoly random_poly(std::mt19937& rng, double anchor, cplx beta, std::size_t degree) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> p(degree + 1), q(degree + 1);
    for (std::size_t k = 0; k <= degree; ++k) {
        p[k] = {u(rng), u(rng)};
        q[k] = {u(rng), u(rng)};
    }
    return TrigPoly(anchor, beta, p, q);
}

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(TrigPoly, RejectsUnequalOrEmptyCoefficients) {
    EXPECT_THROW(TrigPoly(0.0, 1.0, {1.0, 2.0}, {1.0}), ContractViolation);
    EXPECT_THROW(TrigPoly(0.0, 1.0, {}, {}), ContractViolation);
}

TEST(TrigPoly, RejectsFrequencyBelowFloor) {
    EXPECT_THROW(TrigPoly::cosine(0.0, 1e-9), DegenerateFrequency);
    EXPECT_THROW(BandedOperator(cplx(0.0, 1e-10), 4), DegenerateFrequency);
}

TEST(TrigPoly, EvaluatesTrigAndHyperbolicPieces) {
    EXPECT_NEAR(TrigPoly::unit_sine(0.0, 1.0).eval(std::numbers::pi / 2), 1.0, 1e-15);
    EXPECT_NEAR(TrigPoly::cosine(0.0, cplx(0.0, 1.0)).eval(1.0), std::cosh(1.0), 1e-14);
    // sinh through an imaginary frequency: sin(i x) / i
    EXPECT_NEAR(TrigPoly::unit_sine(0.0, cplx(0.0, 1.0)).eval(0.7), std::sinh(0.7), 1e-14);
}

TEST(TrigPoly, DerivativeOfHalfXCosX) {
    const auto p = TrigPoly::monomial(0.0, 1.0, 1, 0.5, 0.0);
    for (double x : {0.0, 0.4, 1.3, 2.9}) {
        EXPECT_NEAR(p.eval_deriv(x), 0.5 * (std::cos(x) - x * std::sin(x)), 1e-14);
    }
}

TEST(TrigPoly, RealityCheckRejectsComplexValues) {
    const TrigPoly f(0.0, 1.0, {cplx(0.0, 1.0)}, {0.0});
    EXPECT_THROW(f.eval(0.3), InternalConsistency);
}

TEST(TrigPoly, AnchorIsRespected) {
    const auto f = TrigPoly::cosine(2.0, 3.0);
    EXPECT_NEAR(f.eval(2.5), std::cos(1.5), 1e-15);
}

TEST(Hamiltonian, XCosTwoXGivesFourSinTwoX) {
    const auto f = TrigPoly::monomial(0.0, 2.0, 1, 1.0, 0.0);
    const auto h = apply_hamiltonian(f, -4.0);
    EXPECT_EQ(h.degree(), 0u);
    EXPECT_NEAR(std::abs(h.cos_coeff(0)), 0.0, 1e-15);
    EXPECT_NEAR(h.sin_coeff(0).real(), 4.0, 1e-15);
}

TEST(Hamiltonian, AnnihilatesHomogeneousSolutions) {
    for (cplx b : {cplx(1.3), cplx(0.0, 2.1)}) {
        EXPECT_TRUE(apply_hamiltonian(TrigPoly::cosine(0.4, b), (-b * b).real()).is_zero());
        EXPECT_TRUE(apply_hamiltonian(TrigPoly::unit_sine(0.4, b), (-b * b).real()).is_zero());
    }
}

TEST(Hamiltonian, QuadraticResonantTerm) {
    // beta x^2 cos(beta x) - x sin(beta x) with beta = 1 -> 4 x sin x
    TrigPoly f(0.0, 1.0, {0.0, 0.0, 1.0}, {0.0, -1.0, 0.0});
    const auto h = apply_hamiltonian(f, -1.0);
    for (double x : {0.1, 0.8, 2.2, 3.0}) EXPECT_NEAR(h.eval(x), 4.0 * x * std::sin(x), 1e-13);
    EXPECT_NEAR(h.sin_coeff(1).real(), 4.0, 1e-15);
}

TEST(Hamiltonian, RejectsMismatchedOffset) {
    EXPECT_THROW(apply_hamiltonian(TrigPoly::cosine(0.0, 2.0), -3.0), ContractViolation);
}

TEST(Hamiltonian, DegreeDropsByOne) {
    std::mt19937 rng(3);
    for (std::size_t d = 1; d <= 5; ++d) {
        const auto f = TrigPoly::monomial(0.0, 1.7, d, 1.0, 0.5);
        EXPECT_EQ(apply_hamiltonian(f, -1.7 * 1.7).degree(), d - 1);
    }
}

TEST(ParticularSolution, SineForcingGivesHalfXCosX) {
    const auto p = particular_solution(TrigPoly::monomial(0.0, 1.0, 0, 0.0, 1.0));
    EXPECT_EQ(p.degree(), 1u);
    for (double x : {0.2, 1.0, 2.5}) EXPECT_NEAR(p.eval(x), 0.5 * x * std::cos(x), 1e-15);
}

TEST(ParticularSolution, ZeroForcingGivesZero) {
    EXPECT_TRUE(particular_solution(TrigPoly::zero(0.0, 1.2, 3)).is_zero());
}

TEST(ParticularSolution, XSinForcing) {
    const double b = 1.5;
    const auto p = particular_solution(TrigPoly::monomial(0.0, b, 1, 0.0, 1.0));
    for (double x : {0.3, 1.1, 2.0}) {
        const double expect = (b * x * x * std::cos(b * x) - x * std::sin(b * x)) / (4 * b * b);
        EXPECT_NEAR(p.eval(x), expect, 1e-14);
    }
    const auto back = apply_hamiltonian(p, -b * b);
    for (double x : {0.3, 1.1, 2.0}) EXPECT_NEAR(back.eval(x), x * std::sin(b * x), 1e-14);
}

TEST(ParticularSolution, RoundTripRandom) {
    std::mt19937 rng(20240611);
    std::uniform_int_distribution<std::size_t> deg(0, 6);
    std::uniform_real_distribution<double> xs(-1.5, 1.5);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const cplx b = random_frequency(rng);
        const auto f = random_poly(rng, 0.25, b, deg(rng));
        const auto back = apply_hamiltonian(particular_solution(f), (-b * b).real());
        for (int i = 0; i < 100; ++i) {
            const double x = 0.25 + xs(rng);
            worst = std::max(worst, rel_err(back.value_complex(x), f.value_complex(x)));
        }
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(ParticularSolution, InitialValueSolve) {
    const cplx b(0.0, 1.4);
    const auto rhs = TrigPoly::monomial(1.0, b, 2, 0.3, cplx(0.0, 0.2));
    const auto f = solve_initial_value(rhs, 0.7, -1.1);
    EXPECT_NEAR(f.eval(1.0), 0.7, 1e-15);
    EXPECT_NEAR(f.eval_deriv(1.0), -1.1, 1e-14);
}

TEST(BandedOperator, GeneratorSquaresToMinusIdentity) {
    const Block j = BandedOperator::generator();
    EXPECT_NEAR((j * j + Block::Identity()).norm(), 0.0, 0.0);
}

TEST(BandedOperator, ThreeBlockDiagonalsMainIsZero) {
    const BandedOperator op(cplx(1.2, 0.0), 8);
    const auto a = op.action_matrix();
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            const auto br = r / 2, bc = c / 2;
            if (bc - br != 1 && bc - br != 2) {
                EXPECT_EQ(a(r, c), cplx(0.0));
            }
        }
    }
}

TEST(BandedOperator, LeftInverseOnTruncation) {
    for (cplx b : {cplx(0.5), cplx(0.75), cplx(2.7), cplx(0.0, 0.8), cplx(0.0, 3.0), cplx(4.5)}) {
        const BandedOperator op(b, 20);
        const Eigen::MatrixXcd a = op.action_matrix(), l = op.left_inverse_matrix();
        const Eigen::MatrixXcd prod = l * a;
        double worst = 0.0;
        for (Eigen::Index c = 2; c < prod.cols(); ++c) {
            for (Eigen::Index r = 0; r < prod.rows(); ++r) {
                worst = std::max(worst, std::abs(prod(r, c) - (r == c ? 1.0 : 0.0)));
            }
        }
        // entries grow like n!/(2b)^n, so the cancellation leaves a few ulps of the largest product
        const double bound = 8 * std::numeric_limits<double>::epsilon() * l.cwiseAbs().maxCoeff() *
                             a.cwiseAbs().maxCoeff();
        EXPECT_LT(worst, std::max(bound, 1e-12)) << "beta = " << b;
        if (bound < 1e-13) EXPECT_LT(worst, 1e-12) << "beta = " << b;
    }
}

TEST(BandedOperator, LeftInverseListedRows) {
    const cplx b(1.3);
    const BandedOperator op(b, 12);
    const Block j = BandedOperator::generator();
    for (std::size_t n = 0; n < 6; ++n) {
        const double n1 = static_cast<double>(n + 1);
        EXPECT_NEAR((op.left_inverse_block(n + 1, n) + j / (2.0 * b * n1)).norm(), 0.0, 1e-15);
        const double g = (n + 2.0) * (n + 3.0) * (n + 4.0);
        EXPECT_NEAR((op.left_inverse_block(n + 1, n + 4) + std::pow(2.0 * b, -5.0) * g * j).norm(),
                    0.0, 1e-14);
    }
}

TEST(TrigPolyAlgebra, Linearity) {
    std::mt19937 rng(11);
    const cplx b(0.0, 1.9);
    const auto f = random_poly(rng, 0.0, b, 3);
    const auto g = random_poly(rng, 0.0, b, 4);
    const cplx s(0.3, -1.2);
    const double off = (-b * b).real();
    const auto lhs = apply_hamiltonian(f + g * s, off);
    const auto rhs = apply_hamiltonian(f, off) + apply_hamiltonian(g, off) * s;
    const auto pl = particular_solution(f + g * s);
    const auto pr = particular_solution(f) + particular_solution(g) * s;
    for (double x : {-0.7, 0.2, 1.4}) {
        EXPECT_LT(rel_err(lhs.value_complex(x), rhs.value_complex(x)), 1e-13);
        EXPECT_LT(rel_err(pl.value_complex(x), pr.value_complex(x)), 1e-13);
    }
}

TEST(TrigPolyAlgebra, MulPolynomial) {
    const auto c = TrigPoly::cosine(0.0, 1.0);
    EXPECT_NEAR(mul_polynomial(c, std::vector<double>{1.0}).eval(0.9), std::cos(0.9), 1e-15);
    const auto s = TrigPoly::unit_sine(0.0, 1.0);
    EXPECT_NEAR(mul_polynomial(s, std::vector<double>{0.0, 1.0}).eval(0.9), 0.9 * std::sin(0.9), 1e-15);
    const auto xc = TrigPoly::monomial(0.0, 1.0, 1, 1.0, 0.0);
    const auto prod = mul_polynomial(xc, std::vector<double>{2.0, 3.0});
    EXPECT_EQ(prod.degree(), 2u);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> xs(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const double x = xs(rng);
        const double expect = (2 * x + 3 * x * x) * std::cos(x);
        EXPECT_NEAR(prod.eval(x), expect, 1e-12 * std::max(1.0, std::abs(expect)));
    }
}

TEST(TrigPolyAlgebra, ShiftPolynomial) {
    // 1 + 2x + 3x^2 around a = 1.5
    const std::vector<double> p{1.0, 2.0, 3.0};
    const auto s = shift_polynomial(p, 1.5);
    for (double x : {-1.0, 0.0, 2.3}) EXPECT_NEAR(eval_polynomial(s, x - 1.5), eval_polynomial(p, x), 1e-13);
}
