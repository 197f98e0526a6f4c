#pragma once

// Hand-transcribed closed-form secular functions for a few wells, used to
// cross-check roots of the generic matching determinant.  Each returns the
// value together with a magnitude scale built from its individual terms.

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

namespace golden {

using cplx = std::complex<double>;

struct Value {
    double value;
    double scale;
    double relative() const { return std::abs(value) / scale; }
};

/// Step: V = 0 on (0,P), H on (P,Q).  gamma tan(beta P) - beta tan(gamma (P-Q)).
inline Value step(double p, double q, double h, double e) {
    const cplx beta = std::sqrt(cplx(e));
    const cplx gamma = std::sqrt(cplx(e - h));
    const cplx a = gamma * std::tan(beta * p);
    const cplx b = beta * std::tan(gamma * (p - q));
    return {std::abs(a - b), std::abs(a) + std::abs(b)};
}

/// Double well: 0 on (0,P), H1 on (P,Q), H2 on (Q,R), for H2 < E < H1.
inline Value double_well(double p, double q, double r, double h1, double h2, double e) {
    const double beta = std::sqrt(e);
    const double alpha = std::sqrt(h1 - e);
    const double gamma = std::sqrt(e - h2);
    const double A = std::atan(alpha / beta);
    const double D = std::atan(alpha / gamma);
    const double B = beta * p;
    const double C = gamma * (q - r);
    const double t1 = std::exp(alpha * (q - p)) * std::cos(B - A) * std::cos(C + D);
    const double t2 = std::exp(-alpha * (q - p)) * std::cos(B + A) * std::cos(C - D);
    return {t1 - t2, std::abs(t1) + std::abs(t2)};
}

/// Two barriers of height H on (P,Q) and (R,S), walls at 0 and T, 0 < E < H.
inline Value double_barrier(double p, double q, double r, double s, double t, double h, double e) {
    const double alpha = std::acos(std::sqrt(e / h));
    const double kappa = std::sqrt(e);
    const double delta = std::sqrt(h - e);
    auto F = [&](double a) {
        return std::sin((r - q) * kappa) * std::cos((t - s) * kappa + a) * std::cos(p * kappa - a);
    };
    auto G = [&](double a) {
        return std::sin(2 * a - (r - q) * kappa) * std::cos((t - s) * kappa - a) *
               std::cos(p * kappa - a);
    };
    const double eq = std::exp((q - p) * delta), es = std::exp((s - r) * delta);
    const double terms[] = {eq * F(alpha) / es, eq * G(alpha) * es, F(-alpha) * es / eq,
                            G(-alpha) / es / eq};
    double scale = 0.0;
    for (double x : terms) scale += std::abs(x);
    return {terms[0] + terms[1] + terms[2] + terms[3], scale};
}

/// Three barriers of height H on (P,Q), (R,S), (T,U), walls at 0 and W, 0 < E < H.
inline Value triple_barrier(double P, double Q, double R, double S, double T, double U, double W,
                            double h, double e) {
    const double kappa = std::sqrt(e);
    const double delta = std::sqrt(h - e);
    const double alpha = std::acos(std::sqrt(e / h));
    auto F1 = [&](double a) {
        return std::cos(P * kappa + a) * std::sin((R - Q) * kappa + 2 * a) *
               std::sin((T - S) * kappa + 2 * a) * std::cos((W - U) * kappa + a);
    };
    auto F2 = [&](double a) {
        return std::cos(P * kappa + a) * std::sin((R - Q) * kappa + 2 * a) *
               std::sin((T - S) * kappa) * std::cos((W - U) * kappa - a);
    };
    auto F3 = [&](double a) {
        return std::cos(P * kappa + a) * std::sin((R - Q) * kappa) * std::sin((T - S) * kappa) *
               std::cos((W - U) * kappa + a);
    };
    auto F4 = [&](double a) {
        return std::cos(P * kappa + a) * std::sin((R - Q) * kappa) *
               std::sin((T - S) * kappa - 2 * a) * std::cos((W - U) * kappa - a);
    };
    const double base = -(P + Q + R + S + T + U) * delta;
    auto ex = [&](double x, double y, double z) { return std::exp(2 * (x + y + z) * delta + base); };
    const double a = alpha;
    const double terms[] = {-F1(a) * ex(P, R, T),  F2(a) * ex(P, R, U),  F3(a) * ex(P, S, T),
                            -F4(a) * ex(P, S, U),  F1(-a) * ex(Q, S, U), -F2(-a) * ex(Q, S, T),
                            -F3(-a) * ex(Q, R, U), F4(-a) * ex(Q, R, T)};
    double sum = 0.0, scale = 0.0;
    for (double x : terms) {
        sum += x;
        scale += std::abs(x);
    }
    return {sum, scale};
}

}  // namespace golden
