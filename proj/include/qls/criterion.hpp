#ifndef QLS_CRITERION_HPP
#define QLS_CRITERION_HPP

#include <functional>
#include <string>
#include <vector>

#include "qls/model.hpp"

namespace qls {

enum class SlopeMethod { IntegralFormula, BranchFiniteDifference, GPClosedForm };
enum class Verdict { StableSlope, UnstableSlope, Inconclusive };

struct CriterionReport {
    double p_prime_0 = 0.0;
    SlopeMethod method = SlopeMethod::IntegralFormula;
    double tolerance = 0.0; // Inconclusive band half-width
    Verdict verdict = Verdict::Inconclusive;
    double kappa = 0.0;
    std::string model_id;
};

// Slope of the renormalized momentum along the branch at c=0:
// P'(0) = -8 r0^3/(3 sqrt(F(0)))
//         + int_0^{r0} ((r^2-r0^2)^2/r^2)(sqrt(nu(r^2)/F(r^2)) - 1/sqrt(F(0))) dr
// with the mandatory endpoint substitution r = r0 - s^2 on [r0/2, r0].
// Tolerance = 10x the quadrature error estimate; sign gives the verdict.
CriterionReport vk_slope_integral(const NonlinearModel& model);

// One-sided Richardson extrapolation of s(c) = (P(c) - r0^2 pi)/c at c_step
// and c_step/2, with P(c) from the branch quadrature.
CriterionReport vk_slope_branch_fd(const NonlinearModel& model, double c_step);

// Closed-form slope for the cubic defocusing case (h = identity):
// inverse-hyperbolic branch for kappa > 0, arctangent branch for
// -1/2 < kappa < 0, analytic limit -sqrt(2-c^2) at kappa = 0 (the limit value
// is convention-dependent; see the cross-method factor note in the README).
double gp_closed_form_slope(double c, double kappa);

// Root of gp_closed_form_slope(0, kappa) on [1, 10], reported to 1e-8.
double find_kappa0();

struct SweepRow {
    double kappa = 0.0;
    double p_prime_0 = 0.0;
    Verdict verdict = Verdict::Inconclusive;
    bool ok = false;
    std::string error; // per-row failure recorded, sweep continues
};

// One vk_slope_integral row per kappa; rows run in parallel, capped by the
// QLS_THREADS environment variable.
std::vector<SweepRow> sweep_kappa(const std::function<NonlinearModel(double)>& family,
                                  const std::vector<double>& kappa_grid);

const char* to_string(Verdict v);
const char* to_string(SlopeMethod m);

} // namespace qls

#endif
