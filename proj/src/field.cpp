#include "qls/field.hpp"

#include <algorithm>
#include <cmath>

#include "qls/errors.hpp"

namespace qls {

int FieldState::nearest_index(double xq) const {
    int i = static_cast<int>(std::lround((xq - x0) / dx));
    return std::clamp(i, 0, n() - 1);
}

void FieldState::validate() const {
    if (!(dx > 0.0)) throw validation_error("FieldState: dx must be positive");
    if (n() < 16) throw validation_error("FieldState: at least 16 samples required");
    if (!(r0 > 0.0)) throw validation_error("FieldState: r0 must be positive");
}

namespace {

template <class T>
std::vector<T> deriv4_impl(const std::vector<T>& y, double dx, Boundary b) {
    const int n = static_cast<int>(y.size());
    std::vector<T> d(n);
    if (n < 5) throw validation_error("derivative4: need at least 5 samples");
    const double w = 1.0 / (12.0 * dx);
    auto at = [&](int i) -> T {
        if (b == Boundary::Periodic) {
            // last sample duplicates the first period point only conceptually;
            // wrap plainly
            i = ((i % n) + n) % n;
            return y[i];
        }
        return y[i];
    };
    if (b == Boundary::Periodic) {
        for (int i = 0; i < n; ++i)
            d[i] = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) * w;
        return d;
    }
    for (int i = 2; i + 2 < n; ++i)
        d[i] = (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) * w;
    d[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) * w;
    d[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) * w;
    d[n - 1] =
        (25.0 * y[n - 1] - 48.0 * y[n - 2] + 36.0 * y[n - 3] - 16.0 * y[n - 4] + 3.0 * y[n - 5]) * w;
    d[n - 2] =
        (3.0 * y[n - 1] + 10.0 * y[n - 2] - 18.0 * y[n - 3] + 6.0 * y[n - 4] - y[n - 5]) * w;
    return d;
}

} // namespace

std::vector<cdouble> derivative4(const FieldState& f) {
    return deriv4_impl(f.v, f.dx, f.boundary);
}

std::vector<double> derivative4(const std::vector<double>& y, double dx) {
    return deriv4_impl(y, dx, Boundary::Background);
}

double integrate_samples(const std::vector<double>& y, double dx) {
    const int n = static_cast<int>(y.size());
    if (n < 2) return 0.0;
    int m = n - 1; // interval count
    double s = 0.0;
    int start = 0;
    if (m % 2 == 1) {
        if (n >= 4) {
            // 3/8 rule on the first three intervals
            s += dx * 3.0 / 8.0 * (y[0] + 3.0 * y[1] + 3.0 * y[2] + y[3]);
            start = 3;
        } else {
            return dx * 0.5 * (y[0] + y[1]); // single interval: trapezoid
        }
    }
    for (int i = start; i + 2 < n; i += 2)
        s += dx / 3.0 * (y[i] + 4.0 * y[i + 1] + y[i + 2]);
    return s;
}

double integrate_error_estimate(const std::vector<double>& y, double dx) {
    const int n = static_cast<int>(y.size());
    if (n < 3) return 0.0;
    double trap = 0.5 * (y.front() + y.back());
    for (int i = 1; i + 1 < n; ++i) trap += y[i];
    trap *= dx;
    return std::fabs(integrate_samples(y, dx) - trap);
}

} // namespace qls
