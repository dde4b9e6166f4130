#include "qls/roots.hpp"

#include <cmath>
#include <utility>

#include "qls/errors.hpp"

namespace qls {

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw numerical_error("brent_root: endpoints do not bracket a root");
    if (std::fabs(fa) < std::fabs(fb)) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = a, fc = fa, s = b, fs = fb, d = 0.0;
    bool mflag = true;
    for (int it = 0; it < max_iter; ++it) {
        if (fb == 0.0 || std::fabs(b - a) < xtol) return b;
        if (fa != fc && fb != fc) {
            // inverse quadratic interpolation
            s = a * fb * fc / ((fa - fb) * (fa - fc)) +
                b * fa * fc / ((fb - fa) * (fb - fc)) +
                c * fa * fb / ((fc - fa) * (fc - fb));
        } else {
            s = b - fb * (b - a) / (fb - fa); // secant
        }
        double lo = (3.0 * a + b) / 4.0, hi = b;
        if (lo > hi) std::swap(lo, hi);
        bool bad = (s < lo || s > hi) ||
                   (mflag && std::fabs(s - b) >= std::fabs(b - c) / 2.0) ||
                   (!mflag && std::fabs(s - b) >= std::fabs(c - d) / 2.0) ||
                   (mflag && std::fabs(b - c) < xtol) ||
                   (!mflag && std::fabs(c - d) < xtol);
        if (bad) {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if (fa * fs < 0.0) {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if (std::fabs(fa) < std::fabs(fb)) {
            std::swap(a, b);
            std::swap(fa, fb);
        }
    }
    throw numerical_error("brent_root: iteration limit reached");
}

double golden_max(const std::function<double(double)>& g, double a, double b,
                  double xtol, int max_iter) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double g1 = g(x1), g2 = g(x2);
    for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
        if (g1 < g2) {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + invphi * (b - a);
            g2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - invphi * (b - a);
            g1 = g(x1);
        }
    }
    return 0.5 * (a + b);
}

} // namespace qls
