#ifndef QLS_FIELD_HPP
#define QLS_FIELD_HPP

#include <complex>
#include <vector>

namespace qls {

using cdouble = std::complex<double>;

enum class Boundary { Background, Periodic };

// A complex field on a uniform grid x_i = x0 + i*dx, with background modulus
// r0 at infinity. The evolution state and the argument of every functional.
struct FieldState {
    double x0 = 0.0;
    double dx = 0.0;
    std::vector<cdouble> v;
    double r0 = 1.0;
    Boundary boundary = Boundary::Background;

    int n() const { return static_cast<int>(v.size()); }
    double x(int i) const { return x0 + i * dx; }
    double x_end() const { return x0 + (n() - 1) * dx; }
    // index of the grid node nearest to the given coordinate
    int nearest_index(double xq) const;
    void validate() const; // dx>0, >=16 samples, background moduli
};

// Fourth-order first derivative (5-point stencils; one-sided at Background
// edges, wrapped for Periodic).
std::vector<cdouble> derivative4(const FieldState& f);
std::vector<double> derivative4(const std::vector<double>& y, double dx);

// Composite Simpson on uniform samples (3/8 rule patch when the interval
// count is odd). Returns the integral.
double integrate_samples(const std::vector<double>& y, double dx);
// Crude quadrature error estimate: |Simpson - trapezoid|.
double integrate_error_estimate(const std::vector<double>& y, double dx);

} // namespace qls

#endif
