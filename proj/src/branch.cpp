#include "qls/branch.hpp"

#include <cmath>

#include "qls/errors.hpp"
#include "qls/potential.hpp"
#include "qls/quad.hpp"

namespace qls {

double kink_energy_closed(const NonlinearModel& model) {
    const double r0 = model.r0;
    auto f = [&](double r) {
        double sigma = r * r;
        return std::sqrt(std::max(0.0, model.F(sigma)) * model.nu(sigma));
    };
    return 4.0 * integrate(f, 0.0, r0, 1e-12).value;
}

namespace {

// int_{xi}^0 g(sigma,w) sqrt(nu/(-V_c)) dw via w = xi + s^2 (inverse-sqrt
// turning-point singularity removed); the double root of V_c at w=0 is benign
// because both weights below vanish there.
template <class G>
double branch_quad(const NonlinearModel& model, double c, double xi, const G& g) {
    const double mu_sq = model.r0sq() + xi;
    auto f = [&](double s) {
        double w = xi + s * s;
        double sigma = mu_sq + s * s;
        double np = 4.0 * sigma * model.F(sigma) - c * c * w * w;
        if (!(np > 0.0)) return 0.0;
        return 2.0 * s * g(sigma, w) * std::sqrt(model.nu(sigma) / np);
    };
    double s_max = std::sqrt(-xi) * (1.0 - 1e-12);
    return integrate(f, 0.0, s_max, 1e-12).value;
}

} // namespace

double branch_energy(const NonlinearModel& model, double c) {
    if (c == 0.0) return kink_energy_closed(model);
    double xi = branch_root(model, c).xi_c;
    return 4.0 * branch_quad(model, c, xi,
                             [&](double sigma, double) { return model.F(sigma); });
}

double branch_momentum(const NonlinearModel& model, double c) {
    if (c == 0.0) return model.r0sq() * M_PI;
    double xi = branch_root(model, c).xi_c;
    return c * branch_quad(model, c, xi,
                           [](double sigma, double w) { return w * w / sigma; });
}

} // namespace qls
