#ifndef QLS_FUNCTIONALS_HPP
#define QLS_FUNCTIONALS_HPP

#include "qls/field.hpp"
#include "qls/model.hpp"
#include "qls/profile.hpp"

namespace qls {

// Energy int |v'|^2 + F(|v|^2) + (kappa/2)|d_x h(|v|^2)|^2 (Simpson, 4th-order
// finite differences for d_x).
double energy(const FieldState& field, const NonlinearModel& model);

// Renormalized momentum int Im(conj(v) v') (1 - r0^2/|v|^2); requires a
// nonvanishing field (use momentum_untwisted otherwise).
double momentum_renormalized(const FieldState& field);

// Untwisted momentum int Im(conj(v) v') - r0^2 [arg v], arguments unwrapped
// continuously from the center outward, reduced mod 2 pi r0^2 into
// [0, 2 pi r0^2). Agrees with the renormalized momentum mod 2 pi r0^2.
double momentum_untwisted(const FieldState& field);

// Lyapunov functional E_kappa(v) + 2 M r0^4 sin^2((P(v) - r0^2 pi)/(2 r0^2)).
double lyapunov(const FieldState& field, const NonlinearModel& model, double M);

struct FunctionalReport {
    double energy = 0.0;
    double momentum_renormalized = 0.0; // NaN when the field vanishes
    double momentum_untwisted = 0.0;
    double lyapunov = 0.0;
    double min_modulus = 0.0;
    double quadrature_error = 0.0;
};
FunctionalReport functional_report(const FieldState& field, const NonlinearModel& model,
                                   double M);

// Distances on a common grid. d_X uses the value at the node nearest x=0;
// d_inf replaces it by the sup of |a-b|; d_0 uses |a|^2-|b|^2 and a
// (1+x^4)^{-1}-weighted L^2 term (smoother, used for modulation fitting).
double distance_dX(const FieldState& a, const FieldState& b);
double distance_dinf(const FieldState& a, const FieldState& b);
double distance_d0(const FieldState& a, const FieldState& b);

// Sample-wise constant K for the pointwise energy bound
// e_kappa(v) >= (1/K)(|v'|^2 + (|v|^2-r0^2)^2) valid for |v|^2 <= r0^2+xi_tilde.
double pointwise_energy_constant(const NonlinearModel& model);

// Variational-pathology probe fields: a smooth plateau at a modulus where the
// relevant sign condition fails, with a phase ramp calibrated so the discrete
// renormalized momentum equals p_target exactly.
enum class PathologyKind { NegativeF, NegativeEllipticity };
FieldState pathology_probe(const NonlinearModel& model, PathologyKind kind, double p_target,
                           int n);

// Gray-soliton tails glued to a flat plateau (modulus mu, linear phase of
// slope C = c(mu)(mu^2-r0^2)/(2 mu^2)) on (-R, R).
struct ConstrainedProfile {
    double mu = 0.0;
    double R = 0.0;
    double c = 0.0;           // speed with floor amplitude mu
    double phase_slope = 0.0; // C inside the plateau
    FieldState field;
    SolitonProfile tail;
};

// Speed c with mu_c = mu (Brent inversion of the monotone map c -> mu_c).
double speed_for_floor(const NonlinearModel& model, double mu);

ConstrainedProfile constrained_profile(const NonlinearModel& model, double mu, double R,
                                       double x_max = 0.0, int n = 4096);

// Exact (quadrature-level) energy, momentum and Lyapunov value of the glued
// field: plateau contributions are closed-form, tails use branch quadratures.
// Needed because the optimal R is far below any reasonable grid spacing.
struct ConstrainedReport {
    double energy = 0.0;
    double momentum = 0.0;
    double lyapunov = 0.0;
};
ConstrainedReport constrained_report(const NonlinearModel& model, double mu, double R,
                                     double M);

} // namespace qls

#endif
