#ifndef QLS_POTENTIAL_HPP
#define QLS_POTENTIAL_HPP

#include "qls/model.hpp"

namespace qls {

// V_c(xi) = c^2 xi^2 - 4 (r0^2+xi) F(r0^2+xi); the sign structure of this
// well on (-r0^2, 0) decides which traveling waves exist.
struct PotentialSlice {
    const NonlinearModel* model = nullptr;
    double c = 0.0;
    double c_s = 0.0; // cached speed of sound
};

struct BranchRoot {
    double xi_c = 0.0;            // simple root xi(c) in (-r0^2, 0); -r0^2 at c=0
    double vc_prime_at_root = 0.0;
    bool valid = false;
    double delta_estimate = 0.0; // largest speed for which the continuation
                                 // was verified numerically (grid scan)
};

enum class Existence { TrivialOnly, KinkExists, GraySolitonExists };

PotentialSlice make_slice(const NonlinearModel& model, double c);

double potential_eval(const PotentialSlice& slice, double xi);
double potential_eval(const NonlinearModel& model, double c, double xi);
// dV_c/dxi
double potential_deriv(const NonlinearModel& model, double c, double xi);

// Root of V_c in (-r0^2, 0) with V_c' < 0 there and V_c < 0 on (xi(c), 0).
// Brent on a bracket found by geometric sweep from -r0^2 + 1e-12.
// reject_near_sonic: speeds above 0.95 c_s are refused (ill-conditioned).
// estimate_delta additionally scans the speed grid for BranchRoot::delta_estimate.
BranchRoot branch_root(const NonlinearModel& model, double c,
                       bool reject_near_sonic = true, bool estimate_delta = false);

Existence classify_existence(const NonlinearModel& model, double c);

} // namespace qls

#endif
