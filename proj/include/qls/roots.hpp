#ifndef QLS_ROOTS_HPP
#define QLS_ROOTS_HPP

#include <functional>

namespace qls {

// Brent's method on a bracketing interval [a, b] with f(a)*f(b) <= 0.
// Throws numerical_error if the bracket is invalid or iterations run out.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol = 1e-13, int max_iter = 200);

// Golden-section maximization of a unimodal-ish g on [a, b]; returns argmax.
// Used with a coarse grid pre-scan, so mild multimodality is tolerated.
double golden_max(const std::function<double(double)>& g, double a, double b,
                  double xtol = 1e-12, int max_iter = 200);

} // namespace qls

#endif
