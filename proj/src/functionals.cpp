#include "qls/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qls/branch.hpp"
#include "qls/errors.hpp"
#include "qls/potential.hpp"
#include "qls/roots.hpp"

namespace qls {

namespace {

std::vector<double> energy_density(const FieldState& field, const NonlinearModel& model) {
    const int n = field.n();
    std::vector<cdouble> vp = derivative4(field);
    std::vector<double> hofs(n);
    for (int i = 0; i < n; ++i) hofs[i] = model.h(std::norm(field.v[i]));
    std::vector<double> hp = derivative4(hofs, field.dx);
    std::vector<double> e(n);
    for (int i = 0; i < n; ++i)
        e[i] = std::norm(vp[i]) + model.F(std::norm(field.v[i])) +
               0.5 * model.kappa * hp[i] * hp[i];
    return e;
}

double min_modulus(const FieldState& field) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& z : field.v) m = std::min(m, std::abs(z));
    return m;
}

// phase samples lifted continuously from the center node outward; throws when
// a genuinely under-resolved jump (near pi with both moduli away from zero)
// makes the lifting ambiguous
std::vector<double> unwrapped_args(const FieldState& field) {
    const int n = field.n();
    std::vector<double> a(n);
    const int mid = n / 2;
    a[mid] = std::arg(field.v[mid]);
    auto step = [&](int from, int to) {
        double raw = std::arg(field.v[to]) - std::arg(field.v[from]);
        double d = std::remainder(raw, 2.0 * M_PI);
        double mods = std::min(std::abs(field.v[to]), std::abs(field.v[from]));
        if (mods >= 0.5 * field.r0 && std::fabs(d) > M_PI - 1e-6)
            throw numerical_error("momentum_untwisted: phase jump near pi between samples; "
                                  "grid too coarse for a continuous lifting");
        a[to] = a[from] + d;
    };
    for (int i = mid + 1; i < n; ++i) step(i - 1, i);
    for (int i = mid - 1; i >= 0; --i) step(i + 1, i);
    return a;
}

} // namespace

double energy(const FieldState& field, const NonlinearModel& model) {
    field.validate();
    return integrate_samples(energy_density(field, model), field.dx);
}

double momentum_renormalized(const FieldState& field) {
    field.validate();
    const double r0sq = field.r0 * field.r0;
    if (min_modulus(field) <= 1e-12 * field.r0)
        throw validation_error(
            "momentum_renormalized: field vanishes; use momentum_untwisted");
    std::vector<cdouble> vp = derivative4(field);
    std::vector<double> dens(field.n());
    for (int i = 0; i < field.n(); ++i) {
        double mod2 = std::norm(field.v[i]);
        dens[i] = std::imag(std::conj(field.v[i]) * vp[i]) * (1.0 - r0sq / mod2);
    }
    return integrate_samples(dens, field.dx);
}

double momentum_untwisted(const FieldState& field) {
    field.validate();
    const double r0sq = field.r0 * field.r0;
    if (std::abs(field.v.front()) < 0.5 * field.r0 ||
        std::abs(field.v.back()) < 0.5 * field.r0)
        throw validation_error("momentum_untwisted: endpoint modulus below r0/2");
    std::vector<cdouble> vp = derivative4(field);
    std::vector<double> dens(field.n());
    for (int i = 0; i < field.n(); ++i)
        dens[i] = std::imag(std::conj(field.v[i]) * vp[i]);
    std::vector<double> args = unwrapped_args(field);
    double p = integrate_samples(dens, field.dx) - r0sq * (args.back() - args.front());
    const double period = 2.0 * M_PI * r0sq;
    p = std::fmod(p, period);
    if (p < 0.0) p += period;
    if (period - p < 1e-12 * period) p = 0.0; // keep roundoff at the seam in [0, period)
    return p;
}

double lyapunov(const FieldState& field, const NonlinearModel& model, double M) {
    if (!(M > 0.0)) throw validation_error("lyapunov: M must be positive");
    const double r0sq = field.r0 * field.r0;
    double p = momentum_untwisted(field);
    double s = std::sin((p - r0sq * M_PI) / (2.0 * r0sq));
    return energy(field, model) + 2.0 * M * r0sq * r0sq * s * s;
}

FunctionalReport functional_report(const FieldState& field, const NonlinearModel& model,
                                   double M) {
    FunctionalReport r;
    r.min_modulus = min_modulus(field);
    r.energy = energy(field, model);
    r.quadrature_error = integrate_error_estimate(energy_density(field, model), field.dx);
    r.momentum_renormalized = (r.min_modulus > 1e-12 * field.r0)
                                  ? momentum_renormalized(field)
                                  : std::numeric_limits<double>::quiet_NaN();
    r.momentum_untwisted = momentum_untwisted(field);
    r.lyapunov = lyapunov(field, model, M);
    return r;
}

namespace {

void require_common_grid(const FieldState& a, const FieldState& b) {
    if (a.n() != b.n() || std::fabs(a.x0 - b.x0) > 1e-9 || std::fabs(a.dx - b.dx) > 1e-12)
        throw validation_error("distance: fields must share a common grid");
}

} // namespace

double distance_dX(const FieldState& a, const FieldState& b) {
    require_common_grid(a, b);
    const int n = a.n();
    std::vector<cdouble> da = derivative4(a), db = derivative4(b);
    std::vector<double> d1(n), d2(n);
    for (int i = 0; i < n; ++i) {
        d1[i] = std::norm(da[i] - db[i]);
        double m = std::abs(a.v[i]) - std::abs(b.v[i]);
        d2[i] = m * m;
    }
    int i0 = a.nearest_index(0.0);
    double point = std::norm(a.v[i0] - b.v[i0]);
    return std::sqrt(integrate_samples(d1, a.dx) + integrate_samples(d2, a.dx) + point);
}

double distance_dinf(const FieldState& a, const FieldState& b) {
    require_common_grid(a, b);
    const int n = a.n();
    std::vector<cdouble> da = derivative4(a), db = derivative4(b);
    std::vector<double> d1(n), d2(n);
    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
        d1[i] = std::norm(da[i] - db[i]);
        double m = std::abs(a.v[i]) - std::abs(b.v[i]);
        d2[i] = m * m;
        sup = std::max(sup, std::norm(a.v[i] - b.v[i]));
    }
    return std::sqrt(integrate_samples(d1, a.dx) + integrate_samples(d2, a.dx) + sup);
}

double distance_d0(const FieldState& a, const FieldState& b) {
    require_common_grid(a, b);
    const int n = a.n();
    std::vector<cdouble> da = derivative4(a), db = derivative4(b);
    std::vector<double> d1(n), d2(n), d3(n);
    for (int i = 0; i < n; ++i) {
        d1[i] = std::norm(da[i] - db[i]);
        double m = std::norm(a.v[i]) - std::norm(b.v[i]);
        d2[i] = m * m;
        double x = a.x(i);
        d3[i] = std::norm(a.v[i] - b.v[i]) / (1.0 + x * x * x * x);
    }
    return std::sqrt(integrate_samples(d1, a.dx) + integrate_samples(d2, a.dx) +
                     integrate_samples(d3, a.dx));
}

double pointwise_energy_constant(const NonlinearModel& model) {
    auto rep = check_hypotheses(model);
    if (!rep.all_pass())
        throw numerical_error("pointwise_energy_constant: H2/H3 fail");
    const double r0sq = model.r0sq();
    const double hi = r0sq + rep.xi_tilde;
    double nu_min = std::numeric_limits<double>::infinity();
    double beta = std::numeric_limits<double>::infinity();
    const int m = 4096;
    for (int j = 0; j <= m; ++j) {
        double sigma = hi * j / m;
        nu_min = std::min(nu_min, model.nu(sigma));
        double d = sigma - r0sq;
        if (std::fabs(d) > 1e-5 * r0sq) beta = std::min(beta, model.F(sigma) / (d * d));
    }
    // at sigma = r0^2 the ratio limit is F''(r0^2)/2
    beta = std::min(beta, 0.5 * rep.h3_fpp_at_r0sq);
    double grad_coef = std::min(1.0, nu_min); // kappa<0 costs at most nu_min per |v'|^2
    double inv_k = std::min(grad_coef, beta);
    if (!(inv_k > 0.0))
        throw numerical_error("pointwise_energy_constant: nonpositive bound constant");
    return 1.0 / inv_k;
}

namespace {

// C^2 smoothstep and its primitive
double smoothstep(double t) { return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t); }
double smoothstep_primitive(double t) {
    double t4 = t * t * t * t;
    return t4 * (2.5 - 3.0 * t + t * t);
}

struct ProbeShape {
    double r = 0.0;     // plateau modulus
    double delta = 0.0; // oscillation amplitude (NegativeEllipticity only)
    double A = 0.0;     // plateau half-width; ramps of width 1 outside
    int osc = 0;        // oscillation count per unit length
};

// envelope: 0 in background, smoothstep ramps on [-A-1,-A] and [A,A+1], 1 on
// the plateau; W is its primitive from the left edge
double envelope(const ProbeShape& s, double x) {
    double ax = std::fabs(x);
    if (ax >= s.A + 1.0) return 0.0;
    if (ax <= s.A) return 1.0;
    return smoothstep(s.A + 1.0 - ax);
}
double envelope_primitive(const ProbeShape& s, double x) {
    if (x <= -s.A - 1.0) return 0.0;
    if (x <= -s.A) return smoothstep_primitive(x + s.A + 1.0);
    if (x <= s.A) return 0.5 + (x + s.A);
    if (x <= s.A + 1.0) return 0.5 + 2.0 * s.A + (0.5 - smoothstep_primitive(s.A + 1.0 - x));
    return 1.0 + 2.0 * s.A;
}

FieldState probe_field(const NonlinearModel& model, const ProbeShape& s, double C,
                       int samples) {
    FieldState f;
    f.r0 = model.r0;
    f.x0 = -(s.A + 2.0);
    f.dx = 2.0 * (s.A + 2.0) / (samples - 1);
    f.v.resize(samples);
    for (int i = 0; i < samples; ++i) {
        double x = f.x(i);
        double w = envelope(s, x);
        double g = (s.osc > 0) ? s.delta * std::sin(2.0 * M_PI * s.osc * x) : 0.0;
        double rho = model.r0 + w * (s.r + g - model.r0);
        double theta = C * envelope_primitive(s, x);
        f.v[i] = std::polar(rho, theta);
    }
    return f;
}

} // namespace

FieldState pathology_probe(const NonlinearModel& model, PathologyKind kind, double p_target,
                           int n) {
    if (n < 1) throw validation_error("pathology_probe: n >= 1 required");
    const double r0 = model.r0;
    // search the plateau modulus where the sign condition fails, avoiding the
    // degenerate radii r0 and r0/4 of the momentum calibration
    double best_r = -1.0, best_score = 0.0;
    for (int j = 1; j < 512; ++j) {
        double r = (0.05 + 0.9 * j / 512.0) * r0;
        if (std::fabs(r - 0.25 * r0) < 0.02 * r0) continue;
        double score;
        if (kind == PathologyKind::NegativeF) {
            score = -model.F(r * r);
        } else {
            double delta = 0.4 * std::min(r0 - r, r);
            score = -model.nu(r * r) * delta * delta;
        }
        if (score > best_score) {
            best_score = score;
            best_r = r;
        }
    }
    if (best_r < 0.0)
        throw validation_error("pathology_probe: requested sign violation does not occur "
                               "for this model");
    ProbeShape s;
    s.r = best_r;
    if (kind == PathologyKind::NegativeF) {
        s.A = 0.5 * n;
        s.delta = 0.0;
        s.osc = 0;
    } else {
        s.A = 1.0;
        s.delta = 0.4 * std::min(r0 - best_r, best_r);
        s.osc = n;
    }
    int samples = std::max(4097, (s.osc > 0 ? 48 * s.osc : 64) * (int)std::lround(
                                     2.0 * (s.A + 2.0)) + 1);
    // analytic seed for the phase-ramp slope, then calibrate against the
    // discrete momentum so P(v_n) = p_target to root tolerance
    FieldState trial = probe_field(model, s, 0.0, samples);
    std::vector<double> wn(samples);
    for (int i = 0; i < samples; ++i)
        wn[i] = envelope(s, trial.x(i)) * (std::norm(trial.v[i]) - r0 * r0);
    double denom = integrate_samples(wn, trial.dx);
    if (std::fabs(denom) < 1e-12)
        throw numerical_error("pathology_probe: degenerate phase calibration");
    double c0 = p_target / denom;
    auto gap = [&](double C) {
        return momentum_renormalized(probe_field(model, s, C, samples)) - p_target;
    };
    double lo = c0 - 0.5 * (std::fabs(c0) + 1.0), hi = c0 + 0.5 * (std::fabs(c0) + 1.0);
    double glo = gap(lo), ghi = gap(hi);
    for (int it = 0; it < 40 && glo * ghi > 0.0; ++it) {
        lo -= 0.5 * (hi - lo);
        hi += 0.5 * (hi - lo);
        glo = gap(lo);
        ghi = gap(hi);
    }
    if (glo * ghi > 0.0)
        throw numerical_error("pathology_probe: momentum calibration failed to bracket");
    double C = brent_root(gap, lo, hi, 1e-14);
    return probe_field(model, s, C, samples);
}

double speed_for_floor(const NonlinearModel& model, double mu) {
    if (!(mu > 0.0)) throw validation_error("speed_for_floor: mu must be positive");
    double cs = speed_of_sound(model);
    auto mu_of = [&](double c) {
        return std::sqrt(std::max(0.0, model.r0sq() + branch_root(model, c).xi_c));
    };
    double c_hi = 0.949 * cs;
    if (mu >= mu_of(c_hi))
        throw validation_error("speed_for_floor: mu too large (speed would be near-sonic)");
    // at very small c the branch root sits within 1e-12 r0^2 of the wall and
    // the root sweep cannot see it; 1e-5 c_s still gives mu(c_lo) << any mu
    double c_lo = 1e-5 * cs;
    if (mu <= mu_of(c_lo))
        throw validation_error("speed_for_floor: mu too small to invert");
    return brent_root([&](double c) { return mu_of(c) - mu; }, c_lo, c_hi, 1e-14);
}

ConstrainedProfile constrained_profile(const NonlinearModel& model, double mu, double R,
                                       double x_max, int n) {
    if (!(mu > 0.0) || mu > 0.2 * model.r0)
        throw validation_error("constrained_profile: require 0 < mu <= 0.2 r0");
    if (R < 0.0) throw validation_error("constrained_profile: R must be >= 0");
    ConstrainedProfile cp;
    cp.mu = mu;
    cp.R = R;
    cp.c = speed_for_floor(model, mu);
    cp.tail = gray_profile(model, cp.c, x_max, n);
    cp.phase_slope = cp.c * (mu * mu - model.r0sq()) / (2.0 * mu * mu);
    FieldState f;
    f.r0 = model.r0;
    f.x0 = cp.tail.x0;
    f.dx = cp.tail.dx;
    f.v.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = f.x(i);
        if (std::fabs(x) <= R) {
            f.v[i] = std::polar(mu, cp.phase_slope * x);
        } else {
            double y = (x > 0.0) ? x - R : x + R;
            double rho = cp.tail.eval->amp_at(y);
            double th = (x > 0.0 ? 1.0 : -1.0) * cp.phase_slope * R + cp.tail.theta_at(y);
            f.v[i] = std::polar(rho, th);
        }
    }
    cp.field = std::move(f);
    return cp;
}

ConstrainedReport constrained_report(const NonlinearModel& model, double mu, double R,
                                     double M) {
    if (!(M > 0.0)) throw validation_error("constrained_report: M must be positive");
    if (!(mu > 0.0) || mu > 0.2 * model.r0)
        throw validation_error("constrained_report: require 0 < mu <= 0.2 r0");
    if (R < 0.0) throw validation_error("constrained_report: R must be >= 0");
    const double r0sq = model.r0sq();
    double c = speed_for_floor(model, mu);
    double C = c * (mu * mu - r0sq) / (2.0 * mu * mu);
    ConstrainedReport rep;
    double mu2 = mu * mu;
    rep.energy = branch_energy(model, c) + 2.0 * R * (mu2 * C * C + model.F(mu2));
    rep.momentum = branch_momentum(model, c) + R * c * (mu2 - r0sq) * (mu2 - r0sq) / mu2;
    double s = std::sin((rep.momentum - r0sq * M_PI) / (2.0 * r0sq));
    rep.lyapunov = rep.energy + 2.0 * M * r0sq * r0sq * s * s;
    return rep;
}

} // namespace qls
