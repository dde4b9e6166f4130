#include "qls/interp.hpp"

#include <algorithm>
#include <cmath>

#include "qls/errors.hpp"

namespace qls {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw validation_error("MonotoneCubic: need >= 2 matching samples");
    for (size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw validation_error("MonotoneCubic: abscissae must strictly increase");
    std::vector<double> d(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    m_.assign(n, 0.0);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (size_t i = 1; i + 1 < n; ++i)
        m_[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    // Fritsch-Carlson limiter
    for (size_t i = 0; i + 1 < n; ++i) {
        if (d[i] == 0.0) {
            m_[i] = m_[i + 1] = 0.0;
            continue;
        }
        double a = m_[i] / d[i], b = m_[i + 1] / d[i];
        double s = a * a + b * b;
        if (s > 9.0) {
            double t = 3.0 / std::sqrt(s);
            m_[i] = t * a * d[i];
            m_[i + 1] = t * b * d[i];
        }
    }
}

double MonotoneCubic::operator()(double xq) const {
    if (xq <= x_.front()) return y_.front();
    if (xq >= x_.back()) return y_.back();
    size_t hi = std::upper_bound(x_.begin(), x_.end(), xq) - x_.begin();
    size_t lo = hi - 1;
    double h = x_[hi] - x_[lo];
    double t = (xq - x_[lo]) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y_[lo] + h10 * h * m_[lo] + h01 * y_[hi] + h11 * h * m_[hi];
}

double cubic_interp_uniform(const std::vector<double>& y, double x0, double dx, double xq) {
    const int n = static_cast<int>(y.size());
    if (n == 0) throw validation_error("cubic_interp_uniform: empty samples");
    double t = (xq - x0) / dx;
    if (t <= 0.0) return y.front();
    if (t >= n - 1) return y.back();
    int i = static_cast<int>(t);
    i = std::clamp(i, 1, n - 3);
    double u = t - i;
    double ym = y[i - 1], y0 = y[i], y1 = y[i + 1], y2 = y[i + 2];
    // 4-point Lagrange centered on [i, i+1]
    return ym * (-u * (u - 1.0) * (u - 2.0) / 6.0) + y0 * ((u * u - 1.0) * (u - 2.0) / 2.0) +
           y1 * (-u * (u + 1.0) * (u - 2.0) / 2.0) + y2 * (u * (u * u - 1.0) / 6.0);
}

} // namespace qls
