#ifndef QLS_MODEL_HPP
#define QLS_MODEL_HPP

#include <functional>
#include <string>

namespace qls {

using ScalarFn = std::function<double(double)>;

enum class BuiltinCase { GP1, GP2, SF3 };

// One equation instance: the nonlinearities (f, h), background amplitude r0,
// quasilinear coupling kappa, plus derivatives and the potential well
// F(sigma) = integral_sigma^{r0^2} f. Immutable after construction; all
// member functions are const and safe to share across threads.
struct NonlinearModel {
    ScalarFn f;
    ScalarFn f_prime;
    ScalarFn h;
    ScalarFn h_prime;
    ScalarFn h_dprime;
    ScalarFn F; // analytic where available, quadrature fallback otherwise
    double r0 = 1.0;
    double kappa = 0.0;
    std::string id; // e.g. "GP1(r0=1,kappa=0)"

    double r0sq() const { return r0 * r0; }
    // Ellipticity factor nu(sigma) = 1 + 2*kappa*sigma*h'(sigma)^2.
    double nu(double sigma) const {
        double hp = h_prime(sigma);
        return 1.0 + 2.0 * kappa * sigma * hp * hp;
    }
};

struct HypothesisReport {
    bool h1_smooth_assumed = true; // declared, never verified
    bool h2_ellipticity = false;
    double h2_worst_sigma = 0.0;
    double h2_margin = 0.0; // min of nu over [0, r0^2]
    bool h3_potential = false;
    double h3_worst_sigma = 0.0;
    double h3_margin = 0.0;        // min of F over [0, r0^2), plus F''(r0^2) check
    double h3_fpp_at_r0sq = 0.0;   // centered second difference of F at r0^2
    double kappa_tilde = 0.0;
    bool kappa_tilde_vacuous = false; // h' vanished somewhere: -inf sentinel
    double xi_tilde = 0.0; // largest cap with F>0 and nu>0 on (r0^2, r0^2+xi]
    bool all_pass() const { return h2_ellipticity && h3_potential; }
};

// The three builtin cases:
//   GP1: f = r0^2-s,                   h = s
//   GP2: f = r0^2-s,                   h = sqrt(1+s)
//   SF3: f = ((1+r0^2)/(1+s))^3 - 1,   h = s
NonlinearModel builtin_model(BuiltinCase case_id, double r0, double kappa);

// Custom model from expression strings for f and h (variable "s").
// Derivatives fall back to centered differences with step 1e-6*(1+s); F to
// adaptive quadrature of f.
NonlinearModel custom_model(const std::string& f_expr, const std::string& h_expr,
                            double r0, double kappa);

// JSON descriptor: {"case":"GP1"|"GP2"|"SF3"|"custom","r0":..,"kappa":..,
//                   "f":"...","h":"..."} (f/h only for "custom").
NonlinearModel model_from_json(const std::string& json_text);

// c_s = sqrt(-2 f'(r0^2)); throws validation_error when f'(r0^2) > 0,
// sets *degenerate when f'(r0^2) == 0 (returns 0).
double speed_of_sound(const NonlinearModel& model, bool* degenerate = nullptr);

// sup over sigma in (0, r0^2] of -1/(2 sigma h'(sigma)^2), grid + golden
// section refinement, 1e-10 relative. Returns -inf with *vacuous set when h'
// vanishes on the grid.
double kappa_tilde(const NonlinearModel& model, bool* vacuous = nullptr);

HypothesisReport check_hypotheses(const NonlinearModel& model, int grid_n = 256);

} // namespace qls

#endif
