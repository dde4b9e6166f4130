#ifndef QLS_QUAD_HPP
#define QLS_QUAD_HPP

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>

#include "qls/errors.hpp"

namespace qls {

struct QuadResult {
    double value = 0.0;
    double error = 0.0; // estimated absolute error
};

// Adaptive Gauss-Kronrod on [a, b]. Callers are expected to have removed
// endpoint singularities by substitution; this only handles smooth-ish
// integrands (possibly with mild endpoint behavior).
template <class F>
QuadResult integrate(const F& f, double a, double b, double tol = 1e-12,
                     unsigned max_depth = 15) {
    if (a == b) return {0.0, 0.0};
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, max_depth, tol, &err);
    if (!std::isfinite(v))
        throw numerical_error("quadrature returned non-finite value");
    return {v, err};
}

} // namespace qls

#endif
