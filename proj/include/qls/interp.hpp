#ifndef QLS_INTERP_HPP
#define QLS_INTERP_HPP

#include <vector>

namespace qls {

// Monotone cubic (Fritsch-Carlson) interpolant of strictly increasing data.
// Slopes are limited so the interpolant preserves monotonicity; used to
// invert the strictly increasing x(eta) maps of the profile quadratures.
class MonotoneCubic {
  public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);
    double operator()(double xq) const; // clamped outside the data range
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

  private:
    std::vector<double> x_, y_, m_; // nodes, values, limited slopes
};

// Four-point Lagrange interpolation on a uniform grid (cubic); values are
// clamped to the end samples outside the grid.
double cubic_interp_uniform(const std::vector<double>& y, double x0, double dx, double xq);

} // namespace qls

#endif
