#ifndef QLS_BRANCH_HPP
#define QLS_BRANCH_HPP

#include "qls/model.hpp"

namespace qls {

// Closed-form kink energy 4 * int_0^{r0} sqrt(F(r^2) nu(r^2)) dr.
double kink_energy_closed(const NonlinearModel& model);

// Energy of the traveling wave along the branch by turning-point quadrature:
// E(c) = 4 int_{xi(c)}^0 F(r0^2+w) sqrt(nu/(-V_c)) dw, substituted w = xi + s^2.
// c = 0 reduces to the closed-form kink energy.
double branch_energy(const NonlinearModel& model, double c);

// Renormalized momentum along the branch:
// P(c) = c int_{xi(c)}^0 (w^2/(r0^2+w)) sqrt(nu/(-V_c)) dw; P(0+) -> r0^2 pi.
double branch_momentum(const NonlinearModel& model, double c);

} // namespace qls

#endif
