#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/airy.hpp>
#include <gtest/gtest.h>

#include "golden.hpp"
#include "pwmatch/oracle.hpp"
#include "pwmatch/zero_order.hpp"

using namespace pwmatch;
using std::numbers::pi;

namespace {

// lowest level of the step 0 on (0,1), 5 on (1,2); finite-difference oracle,
// Richardson over 1999/3999 nodes, agrees with an independent numpy run to 1e-13
constexpr double kStepGround = 4.375151245875711;

PotentialSpec double_well(double h1) { return PotentialSpec::make({0, 1, 2, pi}, {0, h1, 0}); }

std::vector<PotentialSpec> fixture_set() {
    return {PotentialSpec::make({0, pi}, {0}),
            PotentialSpec::make({0, 1, 2}, {0, 5}),
            double_well(10),
            PotentialSpec::make({0, 0.9, 1.4, 2.6, 3.1, 4.2}, {0, 8, 0, 8, 0}),
            PotentialSpec::make({-0.5, 0.3, 1.1, 1.6}, {2.0, -1.5, 4.0})};
}

}  // namespace

TEST(DomainBasis, FlatBothSides) {
    const auto s = PotentialSpec::make({-1, 0, 1}, {0, 0});
    const auto d = build_domain_basis(s, 1.0, 1);
    for (double x : {-0.8, -0.2, 0.3, 0.9}) {
        EXPECT_NEAR(d.cos_value(x), std::cos(x), 1e-15);
        EXPECT_NEAR(d.sin_value(x), std::sin(x), 1e-15);
    }
}

TEST(DomainBasis, HyperbolicRightPiece) {
    const auto s = PotentialSpec::make({-1, 0, 1}, {0, 2});
    const auto d = build_domain_basis(s, 1.0, 1);
    EXPECT_NEAR(d.cos_value(-0.5), std::cos(0.5), 1e-15);
    EXPECT_NEAR(d.cos_value(0.5), std::cosh(0.5), 1e-15);
    EXPECT_NEAR(d.sin_value(0.5), std::sinh(0.5), 1e-15);
}

TEST(DomainBasis, InitialDataAndSmoothnessAtAnchor) {
    const auto s = double_well(10);
    for (std::size_t j = 1; j <= 2; ++j) {
        const auto d = build_domain_basis(s, 4.0, j);
        const double a = d.anchor();
        EXPECT_NEAR(d.cos_left.eval(a), 1.0, 1e-15);
        EXPECT_NEAR(d.cos_right.eval(a), 1.0, 1e-15);
        EXPECT_NEAR(d.cos_left.eval_deriv(a), 0.0, 1e-15);
        EXPECT_NEAR(d.cos_right.eval_deriv(a), 0.0, 1e-15);
        EXPECT_NEAR(d.sin_left.eval(a), 0.0, 1e-15);
        EXPECT_NEAR(d.sin_right.eval(a), 0.0, 1e-15);
        EXPECT_NEAR(d.sin_left.eval_deriv(a), 1.0, 1e-15);
        EXPECT_NEAR(d.sin_right.eval_deriv(a), 1.0, 1e-15);
    }
}

TEST(DomainBasis, DegenerateEnergyRejected) {
    EXPECT_THROW(build_domain_basis(double_well(10), 10.0, 1), DegenerateEnergy);
    EXPECT_THROW(build_domain_basis(double_well(10), 4.0, 3), ContractViolation);
}

TEST(DomainBasis, WronskianIsOne) {
    for (const auto& s : fixture_set()) {
        for (double e : {0.7, 3.3, 9.1}) {
            for (const auto& d : closed_form_domains(s, e)) {
                for (int i = 0; i < 20; ++i) {
                    const double x = d.layout.left_end +
                                     (d.layout.right_end - d.layout.left_end) * (i + 0.5) / 20.0;
                    EXPECT_NEAR(d.wronskian(x), 1.0, 1e-10);
                }
            }
        }
    }
}

TEST(MatchingMatrix, NeedsInteriorBreakpoint) {
    EXPECT_THROW(matching_matrix(PotentialSpec::make({0, 1}, {0}), 3.0), ContractViolation);
    EXPECT_EQ(matching_matrix(double_well(10), 3.0).rows(), 4);
}

TEST(SecularDeterminant, BoxZerosAtSquares) {
    const auto box = PotentialSpec::make({0, pi}, {0});
    for (int n = 1; n <= 4; ++n) EXPECT_NEAR(secular_determinant(box, n * n), 0.0, 1e-14);
    EXPECT_GT(std::abs(secular_determinant(box, 2.25)), 0.1);
}

TEST(SecularDeterminant, GaugeShiftMovesRootsExactly) {
    const auto a = PotentialSpec::make({0, 1, 2}, {0, 5});
    const auto b = PotentialSpec::make({0, 1, 2}, {7.5, 12.5});
    const auto ra = find_eigenvalues(a, 0.1, 30, 3);
    const auto rb = find_eigenvalues(b, 7.6, 37.5, 3);
    ASSERT_EQ(ra.energies.size(), 3u);
    ASSERT_EQ(rb.energies.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(rb.energies[i] - 7.5, ra.energies[i], 1e-11);
    for (double e : {1.0, 6.0, 20.0}) {
        EXPECT_NEAR(secular_determinant(a, e), secular_determinant(b, e + 7.5), 1e-12);
    }
}

TEST(SecularDeterminant, InteriorResonanceIsNotAnEigenvalue) {
    // interval (1, 2.5) at height 0 has a Dirichlet resonance at (pi / 1.5)^2
    const auto s = PotentialSpec::make({0, 1, 2.5, 3.2}, {5, 0, 5});
    const double res = std::pow(pi / 1.5, 2);
    EXPECT_NEAR(assemble_matching_matrix(closed_form_domains(s, res)).determinant(), 0.0, 1e-12);
    const auto r = reduced_determinant(s, res + 1e-6);
    ASSERT_TRUE(r.has_value());
    EXPECT_GT(std::abs(*r), 1e-3);

    const auto scan = find_eigenvalues(s, 0.1, 30, 4);
    const auto fd = fd_eigenvalues(s, 2000, 4);
    ASSERT_EQ(scan.energies.size(), fd.energies.size());
    for (std::size_t i = 0; i < scan.energies.size(); ++i) {
        EXPECT_NEAR(scan.energies[i], fd.energies[i], fd.errors[i] + 1e-9);
    }
}

TEST(FindEigenvalues, UnitBox) {
    const auto r = find_eigenvalues(PotentialSpec::make({0, 1}, {0}), 0, 100, 3);
    ASSERT_EQ(r.energies.size(), 3u);
    for (int n = 1; n <= 3; ++n) EXPECT_NEAR(r.energies[n - 1], n * n * pi * pi, 1e-10);
    EXPECT_FALSE(r.partial);
}

TEST(FindEigenvalues, PartialWhenWindowTooSmall) {
    const auto r = find_eigenvalues(PotentialSpec::make({0, 1}, {0}), 0, 50, 5);
    EXPECT_EQ(r.energies.size(), 2u);
    EXPECT_TRUE(r.partial);
}

TEST(FindEigenvalues, SkipsDegenerateGridPoints) {
    ScanOptions opts;
    opts.beta_floor = 1e-2;
    const auto s = PotentialSpec::make({0, 1, 2}, {0, 1});
    const auto r = find_eigenvalues(s, 0.0, 4.0, 1, opts);
    EXPECT_FALSE(r.diagnostics.empty());
}

TEST(FindEigenvalues, StepGroundStateMatchesOracle) {
    const auto s = PotentialSpec::make({0, 1, 2}, {0, 5});
    const auto r = find_eigenvalues(s, 0.1, 20, 1);
    ASSERT_EQ(r.energies.size(), 1u);
    EXPECT_NEAR(r.energies[0], kStepGround, 1e-10);
    const auto fd = fd_eigenvalues(s, 1999, 1);
    EXPECT_NEAR(r.energies[0], fd.energies[0], fd.errors[0]);
}

TEST(FindEigenvalues, DoubleWellLowestPairIsQuasiDegenerate) {
    const auto r = find_eigenvalues(double_well(10), 0.1, 30, 3);
    ASSERT_EQ(r.energies.size(), 3u);
    EXPECT_LT(r.energies[1] - r.energies[0], 0.5 * (r.energies[2] - r.energies[1]));
    EXPECT_NEAR(r.energies[0], 4.3862035748992, 1e-9);
    EXPECT_NEAR(r.energies[1], 5.4970182043050, 1e-9);
}

TEST(FindEigenvalues, DoubleWellSplittingGrowsWithBarrier) {
    // the wells (0,1) and (2,pi) have different widths, so the doublet is a
    // detuned pair; a taller barrier pushes both levels up at different rates
    double prev = 0.0;
    for (double h : {10.0, 15.0, 20.0, 25.0}) {
        const auto r = find_eigenvalues(double_well(h), 0.1, h, 2);
        ASSERT_EQ(r.energies.size(), 2u);
        const double split = r.energies[1] - r.energies[0];
        EXPECT_GT(split, prev);
        prev = split;
    }
}

TEST(FindEigenvalues, FictitiousBreakpointIsHarmless) {
    for (const auto& s : fixture_set()) {
        auto b = s.breakpoints;
        auto h = s.heights;
        const double mid = 0.5 * (b[0] + b[1]);
        b.insert(b.begin() + 1, mid);
        h.insert(h.begin(), h.front());
        const auto t = PotentialSpec::make(b, h);
        const double lo = s.min_height() + 0.05, hi = s.max_height() + 25.0;
        const auto ra = find_eigenvalues(s, lo, hi, 4);
        const auto rb = find_eigenvalues(t, lo, hi, 4);
        ASSERT_EQ(ra.energies.size(), rb.energies.size());
        for (std::size_t i = 0; i < ra.energies.size(); ++i) {
            EXPECT_NEAR(ra.energies[i], rb.energies[i], 1e-10);
        }
    }
}

TEST(FindEigenvalues, AgreesWithGoldenFormulas) {
    for (double e : find_eigenvalues(PotentialSpec::make({0, 1, 2}, {0, 5}), 0.1, 30, 3).energies) {
        EXPECT_LT(golden::step(1, 2, 5, e).relative(), 1e-8);
    }
    for (double e : find_eigenvalues(double_well(10), 0.1, 9.9, 2).energies) {
        EXPECT_LT(golden::double_well(1, 2, pi, 10, 0, e).relative(), 1e-8);
    }
    const auto s4 = PotentialSpec::make({0, 0.9, 1.4, 2.6, 3.1, 4.2}, {0, 8, 0, 8, 0});
    for (double e : find_eigenvalues(s4, 0.1, 7.9, 6).energies) {
        EXPECT_LT(golden::double_barrier(0.9, 1.4, 2.6, 3.1, 4.2, 8, e).relative(), 1e-8);
    }
}

TEST(MatchCoefficients, FictitiousStepRecoversSine) {
    const auto s = PotentialSpec::make({0, pi / 2, pi}, {0, 0});
    const auto st = match_coefficients(s, 1.0);
    EXPECT_NEAR(std::hypot(st.c[0], st.d[0]), 1.0, 1e-12);
    EXPECT_GT(st.c[0], 0.0);
    EXPECT_LT(st.residual, 1e-10);
    const double amp = st.value(pi / 2);
    for (double x : {0.2, 0.9, 1.7, 2.8}) EXPECT_NEAR(st.value(x), amp * std::sin(x), 1e-12);
}

TEST(MatchCoefficients, StepStateHasAnalyticShape) {
    const double p = 1, q = 2, h = 5;
    const auto s = PotentialSpec::make({0, p, q}, {0, h});
    const auto st = match_coefficients(s, kStepGround);
    const double beta = std::sqrt(kStepGround), alpha = std::sqrt(h - kStepGround);
    // unit slope at the left wall: beta^-1 sin(beta x), then N alpha^-1 sinh(alpha (x - Q))
    const double slope = st.deriv(1e-9);
    const double amp = std::sin(beta * p) / beta * alpha / std::sinh(alpha * (p - q));
    for (double x : {0.1, 0.5, 0.95}) EXPECT_NEAR(st.value(x) / slope, std::sin(beta * x) / beta, 1e-10);
    for (double x : {1.1, 1.5, 1.9}) {
        EXPECT_NEAR(st.value(x) / slope, amp * std::sinh(alpha * (x - q)) / alpha, 1e-10);
    }
}

TEST(MatchCoefficients, ContinuityAtBreakpoints) {
    for (const auto& s : fixture_set()) {
        const auto r = find_eigenvalues(s, s.min_height() + 0.05, s.max_height() + 25.0, 4);
        for (double e : r.energies) {
            const auto st = match_coefficients(s, e, false);
            EXPECT_LT(st.overlap_mismatch, 1e-9);
            for (std::size_t i = 1; i + 1 < s.breakpoints.size(); ++i) {
                const double x = s.breakpoints[i];
                const double l = st.c[i - 1];
                EXPECT_NEAR(st.value(std::nextafter(x, -1e9)), l, 1e-9);
                EXPECT_NEAR(st.deriv(std::nextafter(x, -1e9)), st.deriv(x), 1e-9);
            }
        }
    }
}

TEST(MatchCoefficients, DoubleWellGroundStateMatchesOracleVector) {
    const auto s = double_well(10);
    const auto r = find_eigenvalues(s, 0.1, 9.9, 1);
    const auto st = match_coefficients(s, r.energies[0]);
    const GridHamiltonian g(s, nullptr, 0.0, 4000);
    const auto v = g.eigenvector(g.eigenvalue(0));
    double norm = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) norm += std::pow(st.value(g.node(i)), 2) * g.spacing();
    norm = std::sqrt(norm);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); i += 7) {
        worst = std::max(worst, std::abs(st.value(g.node(i)) / norm - v[i]));
    }
    EXPECT_LT(worst, 1e-3);
}

TEST(MatchCoefficients, RejectsNonRoot) {
    EXPECT_THROW(match_coefficients(double_well(10), 3.0), ContractViolation);
}

TEST(SeriesBasis, ConstantPiecesMatchClosedForm) {
    const auto flat = PotentialSpec::make({0, 1, 2}, {0, 5});
    const auto poly = PotentialSpec::make({0, 1, 2}, {0, 5}, {{0.0, 0.0}, {0.0}});
    for (double e : {2.0, 7.0}) {
        const auto a = build_domain_basis(flat, e, 1);
        const auto b = series_local_basis(poly, e, 1, 60);
        EXPECT_NEAR(a.cos_at_left, b.cos_at_left, 1e-10);
        EXPECT_NEAR(a.cos_at_right, b.cos_at_right, 1e-10);
        EXPECT_NEAR(a.sin_at_left, b.sin_at_left, 1e-10);
        EXPECT_NEAR(a.sin_at_right, b.sin_at_right, 1e-10);
    }
}

TEST(SeriesBasis, AiryFunctionsForLinearPotential) {
    using boost::math::airy_ai;
    using boost::math::airy_ai_prime;
    using boost::math::airy_bi;
    using boost::math::airy_bi_prime;
    // V = x on (0,1), anchor 0.5, E = 0: psi'' = x psi
    const auto s = PotentialSpec::make({0, 0.5, 1}, {0, 0.5}, {{0, 1}, {0, 1}});
    const auto d = series_local_basis(s, 0.0, 1, 60);
    const double a = 0.5;
    auto C = [&](double x) { return pi * (airy_bi_prime(a) * airy_ai(x) - airy_ai_prime(a) * airy_bi(x)); };
    auto S = [&](double x) { return pi * (airy_ai(a) * airy_bi(x) - airy_bi(a) * airy_ai(x)); };
    for (double x : {0.0, 0.2, 0.7, 1.0}) {
        EXPECT_NEAR(d.cos_value(x), C(x), 1e-12);
        EXPECT_NEAR(d.sin_value(x), S(x), 1e-12);
    }
    EXPECT_NEAR(d.wronskian(0.1), 1.0, 1e-12);
}

TEST(SeriesBasis, TruncationBelowMinimum) {
    const auto s = PotentialSpec::make({0, 0.5, 1}, {0, 0.5}, {{0, 1}, {0, 1}});
    EXPECT_THROW(series_local_basis(s, 0.0, 1, 3), TruncationError);
}

TEST(SeriesBasis, LinearRampEigenvaluesMatchOracle) {
    const auto s = PotentialSpec::make({0, 0.5, 1}, {0, 2}, {{0, 4}, {0, 4}});
    const auto r = find_eigenvalues(s, 0.1, 100, 3);
    ASSERT_EQ(r.energies.size(), 3u);
    const auto fd = fd_eigenvalues(s, 2000, 3);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.energies[i], fd.energies[i], fd.errors[i] + 1e-9);
    const auto st = match_coefficients_series(s, r.energies[0]);
    EXPECT_LT(st.residual, 1e-10);
    EXPECT_LT(st.overlap_mismatch, 1e-9);
}
