#include "qls/potential.hpp"

#include <cmath>

#include "qls/errors.hpp"
#include "qls/roots.hpp"

namespace qls {

PotentialSlice make_slice(const NonlinearModel& model, double c) {
    return PotentialSlice{&model, c, speed_of_sound(model)};
}

double potential_eval(const NonlinearModel& model, double c, double xi) {
    const double r0sq = model.r0sq();
    if (r0sq + xi < 0.0)
        throw validation_error("potential_eval: xi < -r0^2 (amplitude squared negative)");
    return c * c * xi * xi - 4.0 * (r0sq + xi) * model.F(r0sq + xi);
}

double potential_eval(const PotentialSlice& slice, double xi) {
    return potential_eval(*slice.model, slice.c, xi);
}

double potential_deriv(const NonlinearModel& model, double c, double xi) {
    const double r0sq = model.r0sq();
    double s = r0sq + xi;
    // F' = -f
    return 2.0 * c * c * xi - 4.0 * model.F(s) + 4.0 * s * model.f(s);
}

namespace {

BranchRoot root_at_speed(const NonlinearModel& model, double c) {
    const double r0sq = model.r0sq();
    BranchRoot out;
    if (c == 0.0) { // kink limit: V_0(-r0^2) = 0 exactly
        out.xi_c = -r0sq;
        out.vc_prime_at_root = potential_deriv(model, 0.0, -r0sq);
        out.valid = true;
        return out;
    }
    // geometric sweep from just above -r0^2 toward 0 looking for V_c < 0
    double lo = -r0sq + 1e-12 * r0sq;
    double flo = potential_eval(model, c, lo);
    if (flo <= 0.0)
        throw numerical_error("branch_root: potential not positive at the inner wall");
    double step = 1e-12 * r0sq;
    double hi = lo;
    double fhi = flo;
    while (hi + step < 0.0) {
        double next = hi + step;
        if (next >= 0.0) break;
        double fn = potential_eval(model, c, next);
        if (fn < 0.0) {
            lo = hi;
            hi = next;
            fhi = fn;
            break;
        }
        hi = next;
        fhi = fn;
        step *= 2.0;
    }
    if (fhi >= 0.0) {
        // geometric sweep can step over a narrow well near 0; fine scan fallback
        const int n = 4096;
        bool found = false;
        double prev = -r0sq + 1e-12 * r0sq, fprev = flo;
        for (int i = 1; i < n; ++i) {
            double xi = -r0sq * (1.0 - static_cast<double>(i) / n);
            double v = potential_eval(model, c, xi);
            if (v < 0.0) {
                lo = prev;
                hi = xi;
                fhi = v;
                found = true;
                break;
            }
            prev = xi;
            fprev = v;
        }
        (void)fprev;
        if (!found)
            throw numerical_error("branch_root: no nontrivial traveling wave at this speed");
    }
    auto V = [&](double xi) { return potential_eval(model, c, xi); };
    out.xi_c = brent_root(V, lo, hi, 1e-13 * r0sq);
    out.vc_prime_at_root = potential_deriv(model, c, out.xi_c);
    if (out.vc_prime_at_root >= 0.0)
        throw numerical_error("branch_root: root is not a simple down-crossing");
    // V_c must stay negative between the root and 0
    for (int i = 1; i < 64; ++i) {
        double xi = out.xi_c * (1.0 - static_cast<double>(i) / 64.0);
        if (xi >= 0.0) break;
        if (potential_eval(model, c, xi) >= 0.0)
            throw numerical_error("branch_root: potential not negative on (xi(c), 0)");
    }
    out.valid = true;
    return out;
}

} // namespace

BranchRoot branch_root(const NonlinearModel& model, double c,
                       bool reject_near_sonic, bool estimate_delta) {
    double cs = speed_of_sound(model);
    if (c < 0.0) throw validation_error("branch_root: c must be >= 0");
    if (c >= cs)
        throw numerical_error("branch_root: no nontrivial traveling wave at this speed (c >= c_s)");
    if (reject_near_sonic && c > 0.95 * cs)
        throw validation_error("branch_root: c > 0.95 c_s rejected (profile quadrature ill-conditioned)");
    BranchRoot out = root_at_speed(model, c);
    if (estimate_delta) {
        // numerical surrogate for the continuation half-width: largest grid
        // speed at which root finding and interior ellipticity succeed
        const int n = 32;
        double best = 0.0;
        for (int i = 1; i <= n; ++i) {
            double cc = 0.95 * cs * static_cast<double>(i) / n;
            try {
                BranchRoot r = root_at_speed(model, cc);
                bool ell = true;
                for (int k = 0; k <= 16; ++k) {
                    double xi = r.xi_c * (1.0 - static_cast<double>(k) / 16.0);
                    if (model.nu(model.r0sq() + xi) <= 0.0) { ell = false; break; }
                }
                if (!ell) break;
                best = cc;
            } catch (const numerical_error&) {
                break;
            }
        }
        out.delta_estimate = best;
    }
    return out;
}

Existence classify_existence(const NonlinearModel& model, double c) {
    double cs = speed_of_sound(model);
    double ac = std::fabs(c);
    if (ac > cs) return Existence::TrivialOnly;
    HypothesisReport hyp = check_hypotheses(model);
    if (ac == 0.0)
        return hyp.all_pass() ? Existence::KinkExists : Existence::TrivialOnly;
    try {
        BranchRoot r = branch_root(model, ac, /*reject_near_sonic=*/false);
        for (int k = 0; k <= 32; ++k) {
            double xi = r.xi_c * (1.0 - static_cast<double>(k) / 32.0);
            if (model.nu(model.r0sq() + xi) <= 0.0) return Existence::TrivialOnly;
        }
        return Existence::GraySolitonExists;
    } catch (const std::exception&) {
        return Existence::TrivialOnly;
    }
}

} // namespace qls
