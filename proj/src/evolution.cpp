#include "qls/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qls/errors.hpp"
#include "qls/functionals.hpp"

namespace qls {

void EvolutionConfig::validate() const {
    if (!(dt > 0.0)) throw validation_error("EvolutionConfig: dt must be positive");
    if (!(fixed_point_tol > 0.0))
        throw validation_error("EvolutionConfig: fixed_point_tol must be positive");
    if (!(ellipticity_floor > 0.0))
        throw validation_error("EvolutionConfig: ellipticity_floor must be positive");
    if (max_inner_iters < 1)
        throw validation_error("EvolutionConfig: max_inner_iters must be >= 1");
}

namespace {

[[noreturn]] void throw_degenerate(double x, double nu) {
    std::ostringstream os;
    os << "degenerate dispersion: ellipticity nu = " << nu << " at x = " << x
       << " fell below the floor";
    throw numerical_error(os.str());
}

// fourth-order second derivative with constant extension (Background) or wrap
template <class T>
std::vector<T> second_derivative(const std::vector<T>& y, double dx, Boundary b) {
    const int n = static_cast<int>(y.size());
    std::vector<T> d(n);
    const double w = 1.0 / (12.0 * dx * dx);
    auto at = [&](int i) -> T {
        if (b == Boundary::Periodic) return y[((i % n) + n) % n];
        return y[std::clamp(i, 0, n - 1)];
    };
    for (int i = 0; i < n; ++i)
        d[i] = (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) -
                at(i + 2)) *
               w;
    return d;
}

} // namespace

std::vector<cdouble> rhs(const FieldState& field, const NonlinearModel& model,
                         double ellipticity_floor) {
    field.validate();
    const int n = field.n();
    std::vector<double> hofs(n);
    for (int i = 0; i < n; ++i) {
        double sigma = std::norm(field.v[i]);
        double nu = model.nu(sigma);
        if (nu < ellipticity_floor) throw_degenerate(field.x(i), nu);
        hofs[i] = model.h(sigma);
    }
    std::vector<cdouble> d2v = second_derivative(field.v, field.dx, field.boundary);
    std::vector<double> d2h = second_derivative(hofs, field.dx, field.boundary);
    std::vector<cdouble> out(n);
    for (int i = 0; i < n; ++i) {
        double sigma = std::norm(field.v[i]);
        cdouble nl = field.v[i] * model.f(sigma) +
                     model.kappa * field.v[i] * model.h_prime(sigma) * d2h[i];
        out[i] = cdouble(0.0, 1.0) * (d2v[i] + nl);
    }
    return out;
}

Evolver::Evolver(const NonlinearModel& model, const EvolutionConfig& config,
                 FieldState initial)
    : model_(model), cfg_(config), state_(std::move(initial)) {
    cfg_.validate();
    state_.validate();
    const int n = state_.n();
    const double dx = state_.dx;
    const cdouble ihalf(0.0, 0.5 * cfg_.dt);
    // A = I - (i dt/2) D; D rows: clamp (0, n-1), 3-point (1, n-2), 5-point inside
    lu_ = std::make_unique<BandedLU>(n, 2, 2);
    auto add = [&](int i, int j, double dcoef) {
        lu_->at(i, j) = ((i == j) ? cdouble(1.0) : cdouble(0.0)) - ihalf * dcoef;
    };
    lu_->at(0, 0) = 1.0;
    lu_->at(n - 1, n - 1) = 1.0;
    const double w2 = 1.0 / (dx * dx), w4 = 1.0 / (12.0 * dx * dx);
    for (int i : {1, n - 2}) {
        add(i, i - 1, w2);
        add(i, i, -2.0 * w2);
        add(i, i + 1, w2);
    }
    for (int i = 2; i + 2 < n; ++i) {
        add(i, i - 2, -w4);
        add(i, i - 1, 16.0 * w4);
        add(i, i, -30.0 * w4);
        add(i, i + 1, 16.0 * w4);
        add(i, i + 2, -w4);
    }
    lu_->factor();
    const int m = std::min(8, n / 2);
    for (int i = 0; i < m; ++i) edge_ref_.push_back(state_.v[i]);
    for (int i = n - m; i < n; ++i) edge_ref_.push_back(state_.v[i]);
}

std::vector<cdouble> Evolver::apply_explicit(const std::vector<cdouble>& v) const {
    const int n = static_cast<int>(v.size());
    const double dx = state_.dx;
    const cdouble ihalf(0.0, 0.5 * cfg_.dt);
    const double w2 = 1.0 / (dx * dx), w4 = 1.0 / (12.0 * dx * dx);
    std::vector<cdouble> out(n);
    out[0] = v[0];
    out[n - 1] = v[n - 1];
    for (int i : {1, n - 2})
        out[i] = v[i] + ihalf * ((v[i - 1] - 2.0 * v[i] + v[i + 1]) * w2);
    for (int i = 2; i + 2 < n; ++i)
        out[i] = v[i] + ihalf * ((-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] +
                                  16.0 * v[i + 1] - v[i + 2]) *
                                 w4);
    return out;
}

std::vector<cdouble> Evolver::d2(const std::vector<double>& y) const {
    // matches the implicit operator's interior rows; clamped rows return 0
    const int n = static_cast<int>(y.size());
    const double dx = state_.dx;
    std::vector<cdouble> d(n, cdouble(0.0));
    const double w2 = 1.0 / (dx * dx), w4 = 1.0 / (12.0 * dx * dx);
    for (int i : {1, n - 2}) d[i] = (y[i - 1] - 2.0 * y[i] + y[i + 1]) * w2;
    for (int i = 2; i + 2 < n; ++i)
        d[i] = (-y[i - 2] + 16.0 * y[i - 1] - 30.0 * y[i] + 16.0 * y[i + 1] - y[i + 2]) *
               w4;
    return d;
}

void Evolver::check_ellipticity(const std::vector<cdouble>& v) const {
    for (size_t i = 0; i < v.size(); ++i) {
        double nu = model_.nu(std::norm(v[i]));
        if (nu < cfg_.ellipticity_floor)
            throw_degenerate(state_.x0 + i * state_.dx, nu);
    }
}

void Evolver::cn_step() {
    const int n = state_.n();
    const double dt = cfg_.dt;
    const std::vector<cdouble>& v0 = state_.v;
    std::vector<cdouble> base = apply_explicit(v0);
    std::vector<cdouble> v1 = v0, b(n), mid(n);
    std::vector<double> hm(n);
    bool converged = false;
    const bool quasilinear = model_.kappa != 0.0;
    for (int it = 0; it < cfg_.max_inner_iters; ++it) {
        for (int i = 0; i < n; ++i) mid[i] = 0.5 * (v0[i] + v1[i]);
        check_ellipticity(mid);
        std::vector<cdouble> d2h;
        if (quasilinear) {
            for (int i = 0; i < n; ++i) hm[i] = model_.h(std::norm(mid[i]));
            d2h = d2(hm);
        }
        for (int i = 0; i < n; ++i) {
            double s0 = std::norm(v0[i]), s1 = std::norm(v1[i]);
            // discrete gradient of -F: exact energy transfer for the
            // semilinear term regardless of the step size. Below the threshold
            // the quotient is pure cancellation noise; the midpoint value
            // agrees with it to O(ds^2) there.
            double g = (std::fabs(s1 - s0) > 1e-5 * (1.0 + s0))
                           ? -(model_.F(s1) - model_.F(s0)) / (s1 - s0)
                           : model_.f(0.5 * (s0 + s1));
            cdouble nl = mid[i] * g;
            if (quasilinear)
                nl += model_.kappa * mid[i] * model_.h_prime(std::norm(mid[i])) * d2h[i];
            b[i] = base[i] + cdouble(0.0, dt) * nl;
        }
        b[0] = v0[0];
        b[n - 1] = v0[n - 1];
        lu_->solve(b);
        double delta = 0.0;
        for (int i = 0; i < n; ++i) delta = std::max(delta, std::abs(b[i] - v1[i]));
        v1.swap(b);
        if (delta < cfg_.fixed_point_tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw numerical_error("Crank-Nicolson fixed point failed to converge");
    for (const auto& z : v1)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw numerical_error("non-finite value after time step");
    state_.v = std::move(v1);
}

void Evolver::strang_step() {
    const int n = state_.n();
    const double dt = cfg_.dt;
    auto half_rotation = [&](std::vector<cdouble>& v) {
        for (int i = 0; i < n; ++i)
            v[i] *= std::polar(1.0, 0.5 * dt * model_.f(std::norm(v[i])));
    };
    std::vector<cdouble> v = state_.v;
    half_rotation(v);
    check_ellipticity(v);
    // implicit dispersion + lagged quasilinear midpoint
    std::vector<cdouble> v0 = v, v1 = v, b(n), mid(n);
    std::vector<double> hm(n);
    std::vector<cdouble> base = apply_explicit(v0);
    bool converged = (model_.kappa == 0.0);
    int iters = (model_.kappa == 0.0) ? 1 : cfg_.max_inner_iters;
    for (int it = 0; it < iters; ++it) {
        for (int i = 0; i < n; ++i) mid[i] = 0.5 * (v0[i] + v1[i]);
        check_ellipticity(mid);
        if (model_.kappa == 0.0) {
            b = base;
        } else {
            for (int i = 0; i < n; ++i) hm[i] = model_.h(std::norm(mid[i]));
            std::vector<cdouble> d2h = d2(hm);
            for (int i = 0; i < n; ++i) {
                double sm = std::norm(mid[i]);
                cdouble nl = model_.kappa * mid[i] * model_.h_prime(sm) * d2h[i];
                b[i] = base[i] + cdouble(0.0, dt) * nl;
            }
        }
        b[0] = v0[0];
        b[n - 1] = v0[n - 1];
        lu_->solve(b);
        double delta = 0.0;
        for (int i = 0; i < n; ++i) delta = std::max(delta, std::abs(b[i] - v1[i]));
        v1.swap(b);
        if (delta < cfg_.fixed_point_tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw numerical_error("Strang implicit stage failed to converge");
    half_rotation(v1);
    for (const auto& z : v1)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw numerical_error("non-finite value after time step");
    state_.v = std::move(v1);
}

void Evolver::step() {
    if (cfg_.scheme == Scheme::CrankNicolsonFixedPoint)
        cn_step();
    else
        strang_step();
    time_ += cfg_.dt;
    if (!boundary_warning_) {
        const int n = state_.n();
        const int m = static_cast<int>(edge_ref_.size()) / 2;
        double e = 0.0;
        for (int i = 0; i < m; ++i) e += std::norm(state_.v[i] - edge_ref_[i]);
        for (int i = 0; i < m; ++i)
            e += std::norm(state_.v[n - m + i] - edge_ref_[m + i]);
        if (e * state_.dx > 1e-8) boundary_warning_ = true;
    }
}

void Evolver::advance_to(double t) {
    while (time_ + 0.5 * cfg_.dt < t) step();
}

FieldState step(const FieldState& field, const NonlinearModel& model,
                const EvolutionConfig& config) {
    Evolver ev(model, config, field);
    ev.step();
    return ev.state();
}

namespace {

struct Objective {
    const FieldState* field;
    const SolitonProfile* kink;
    std::vector<cdouble> da;       // derivative of the field
    std::vector<double> weight;    // trapezoid weights
    std::vector<double> d0_weight; // (1+x^4)^{-1}

    // evaluates J, optionally the exact gradient
    double eval(double z, double phi, double* gz, double* gphi) const {
        const FieldState& a = *field;
        const int n = a.n();
        cdouble rot = std::polar(1.0, phi);
        std::vector<cdouble> U(n), Uz(n);
        std::vector<double> u(n);
        for (int i = 0; i < n; ++i) {
            double x = a.x(i) - z;
            u[i] = kink->eval->kink_value(x);
            U[i] = rot * u[i];
            Uz[i] = -rot * kink->eval->kink_deriv(x);
        }
        std::vector<cdouble> dU = derivative4_c(U, a.dx);
        std::vector<cdouble> dUz = derivative4_c(Uz, a.dx);
        double J = 0.0, Gz = 0.0, Gp = 0.0;
        for (int i = 0; i < n; ++i) {
            double w = weight[i];
            cdouble e1 = dU[i] - da[i];
            double m2 = u[i] * u[i] - std::norm(a.v[i]);
            cdouble e3 = U[i] - a.v[i];
            J += w * (std::norm(e1) + m2 * m2 + d0_weight[i] * std::norm(e3));
            if (gz) {
                double du = -std::real(std::conj(rot) * Uz[i]); // u'(x-z)
                Gz += w * (2.0 * std::real(std::conj(e1) * dUz[i]) +
                           2.0 * m2 * (-2.0 * u[i] * du) +
                           2.0 * d0_weight[i] * std::real(std::conj(e3) * Uz[i]));
                cdouble iU = cdouble(0.0, 1.0) * U[i];
                cdouble idU = cdouble(0.0, 1.0) * dU[i];
                Gp += w * (2.0 * std::real(std::conj(e1) * idU) +
                           2.0 * d0_weight[i] * std::real(std::conj(e3) * iU));
            }
        }
        if (gz) *gz = Gz;
        if (gphi) *gphi = Gp;
        return J;
    }

    static std::vector<cdouble> derivative4_c(const std::vector<cdouble>& y, double dx) {
        FieldState tmp;
        tmp.x0 = 0.0;
        tmp.dx = dx;
        tmp.r0 = 1.0;
        tmp.v = y;
        return derivative4(tmp);
    }
};

} // namespace

ModulationFit fit_modulation(const FieldState& field, const SolitonProfile& kink,
                             double capture_radius, const double* z_init,
                             const double* phi_init) {
    if (!kink.is_kink())
        throw validation_error("fit_modulation: reference profile must be the kink");
    field.validate();
    const int n = field.n();
    Objective obj;
    obj.field = &field;
    obj.kink = &kink;
    obj.da = derivative4(field);
    obj.weight.assign(n, field.dx);
    obj.weight.front() = obj.weight.back() = 0.5 * field.dx;
    obj.d0_weight.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = field.x(i);
        obj.d0_weight[i] = 1.0 / (1.0 + x * x * x * x);
    }
    double z = 0.0, phi = 0.0;
    if (z_init && phi_init) {
        z = *z_init;
        phi = *phi_init;
    } else {
        double best = 1e300;
        for (int iz = 0; iz <= 20; ++iz) {
            double zz = -5.0 + 0.5 * iz;
            for (int ip = 0; ip < 16; ++ip) {
                double pp = -M_PI + 2.0 * M_PI * ip / 16.0;
                double J = obj.eval(zz, pp, nullptr, nullptr);
                if (J < best) {
                    best = J;
                    z = zz;
                    phi = pp;
                }
            }
        }
        if (std::sqrt(best) > 4.0 * capture_radius + 1.0)
            throw numerical_error("fit_modulation: capture radius exceeded at the scan");
    }
    ModulationFit fit;
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
        fit.iterations = it + 1;
        double gz, gp;
        obj.eval(z, phi, &gz, &gp);
        if (std::fabs(gz) + std::fabs(gp) < 1e-14) {
            converged = true;
            break;
        }
        // Hessian by central differences of the exact gradient
        const double hs = 1e-6;
        double gz1, gp1, gz2, gp2;
        obj.eval(z + hs, phi, &gz1, &gp1);
        obj.eval(z - hs, phi, &gz2, &gp2);
        double hzz = (gz1 - gz2) / (2.0 * hs), hpz = (gp1 - gp2) / (2.0 * hs);
        obj.eval(z, phi + hs, &gz1, &gp1);
        obj.eval(z, phi - hs, &gz2, &gp2);
        double hzp = (gz1 - gz2) / (2.0 * hs), hpp = (gp1 - gp2) / (2.0 * hs);
        double det = hzz * hpp - hzp * hpz;
        double dz, dp;
        if (std::fabs(det) > 1e-14) {
            dz = -(hpp * gz - hzp * gp) / det;
            dp = -(-hpz * gz + hzz * gp) / det;
        } else { // gradient descent fallback
            dz = -gz;
            dp = -gp;
        }
        double norm = std::fabs(dz) + std::fabs(dp);
        if (norm > 1.0) {
            dz /= norm;
            dp /= norm;
        }
        z += dz;
        phi += dp;
        if (norm < 1e-12) {
            converged = true;
            break;
        }
    }
    if (!converged) throw numerical_error("fit_modulation: Newton failed to converge");
    fit.z = z;
    fit.phi = std::remainder(phi, 2.0 * M_PI);
    // report the distance with the same quadrature as distance_d0
    FieldState U;
    U.x0 = field.x0;
    U.dx = field.dx;
    U.r0 = field.r0;
    U.v.resize(n);
    cdouble rot = std::polar(1.0, fit.phi);
    for (int i = 0; i < n; ++i) U.v[i] = rot * kink.eval->kink_value(field.x(i) - z);
    fit.d0 = distance_d0(field, U);
    if (fit.d0 > capture_radius)
        throw numerical_error("fit_modulation: capture radius exceeded");
    return fit;
}

EvolutionTrace orbital_stability_experiment(const NonlinearModel& model,
                                            double perturbation_amplitude, double t_final,
                                            const EvolutionConfig& config) {
    SolitonProfile kink = kink_profile(model);
    FieldState f0 = kink.to_field();
    const int n = f0.n();
    for (int i = 0; i < n; ++i) {
        double x = f0.x(i);
        f0.v[i] += perturbation_amplitude * std::exp(-0.5 * x * x) *
                   cdouble(M_SQRT1_2, M_SQRT1_2);
    }
    FieldState ref = kink.to_field();
    EvolutionTrace trace;
    trace.initial_dX = distance_dX(f0, ref);
    Evolver ev(model, config, f0);
    double z_prev = 0.0, phi_prev = 0.0;
    bool warm = false;
    double cadence = std::max(config.output_cadence, config.dt);
    for (double t = 0.0; t <= t_final + 1e-9; t += cadence) {
        ev.advance_to(t);
        const FieldState& s = ev.state();
        trace.times.push_back(ev.time());
        trace.energy.push_back(energy(s, model));
        trace.momentum_untwisted.push_back(momentum_untwisted(s));
        double mn = 1e300;
        for (const auto& zv : s.v) mn = std::min(mn, model.nu(std::norm(zv)));
        trace.min_nu.push_back(mn);
        ModulationFit fit = warm
                                ? fit_modulation(s, kink, 1e9, &z_prev, &phi_prev)
                                : fit_modulation(s, kink);
        warm = true;
        z_prev = fit.z;
        phi_prev = fit.phi;
        trace.z.push_back(fit.z);
        trace.phi.push_back(fit.phi);
        FieldState U = ref;
        cdouble rot = std::polar(1.0, fit.phi);
        for (int i = 0; i < n; ++i)
            U.v[i] = rot * kink.eval->kink_value(U.x(i) - fit.z);
        trace.dX_modulated.push_back(distance_dX(s, U));
    }
    // floor at solver-tolerance scale so unperturbed runs are not flagged
    double d0 = std::max(trace.dX_modulated.front(), 1e-8);
    double dmax = *std::max_element(trace.dX_modulated.begin(), trace.dX_modulated.end());
    trace.growth_flag = dmax >= 5.0 * d0;
    trace.boundary_warning = ev.boundary_warning();
    return trace;
}

} // namespace qls
