#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace pwmatch {

/// Adaptive Gauss-Kronrod integral of a smooth function over [a, b].
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-13) {
    if (!(b > a)) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, tol, &err);
}

}  // namespace pwmatch
