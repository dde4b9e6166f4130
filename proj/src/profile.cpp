#include "qls/profile.hpp"

#include <algorithm>
#include <cmath>

#include "qls/errors.hpp"
#include "qls/interp.hpp"
#include "qls/potential.hpp"
#include "qls/quad.hpp"

namespace qls {

namespace {

// 4-point Gauss-Legendre on [a, b]
template <class F>
double gauss4(const F& f, double a, double b) {
    static const double xg[2] = {0.3399810435848563, 0.8611363115940526};
    static const double wg[2] = {0.6521451548625461, 0.3478548451374538};
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int k = 0; k < 2; ++k)
        s += wg[k] * (f(mid + half * xg[k]) + f(mid - half * xg[k]));
    return s * half;
}

constexpr int kCorePanels = 256;
constexpr int kTailPanels = 512;

} // namespace

ProfileEvaluator::ProfileEvaluator(const NonlinearModel& model, double c)
    : model_(model), c_(c) {
    const double r0sq = model_.r0sq();
    if (c_ < 0.0) throw validation_error("ProfileEvaluator: c must be >= 0");
    if (c_ == 0.0) {
        xi_c_ = -r0sq;
    } else {
        xi_c_ = branch_root(model_, c_).xi_c;
    }
    const double mu_sq = r0sq + xi_c_;

    // core chart: eta = xi(c) + s^2 for eta in [xi(c), xi(c)/2]
    s_split_ = std::sqrt(-xi_c_ / 2.0);
    auto sigma_core = [&](double s) { return mu_sq + s * s; };
    auto negpot = [&](double sigma, double eta) {
        return 4.0 * sigma * model_.F(sigma) - c_ * c_ * eta * eta;
    };
    auto f_core = [&](double s) {
        double sig = sigma_core(s);
        double np = negpot(sig, xi_c_ + s * s);
        if (!(np > 0.0))
            throw numerical_error("profile quadrature: potential not negative inside the well");
        return 2.0 * s * std::sqrt(model_.nu(sig) / np);
    };
    s_nodes_.resize(kCorePanels + 1);
    xs_.resize(kCorePanels + 1);
    s_nodes_[0] = 0.0;
    xs_[0] = 0.0;
    for (int k = 1; k <= kCorePanels; ++k) {
        s_nodes_[k] = s_split_ * static_cast<double>(k) / kCorePanels;
        xs_[k] = xs_[k - 1] + integrate(f_core, s_nodes_[k - 1], s_nodes_[k], 1e-13, 6).value;
    }

    // tail chart: q = -eta, log-uniform from -xi(c)/2 down to ~1e-15 r0^2
    const double q_hi = -xi_c_ / 2.0;
    const double q_min = 1e-15 * r0sq;
    if (!(q_min < q_hi))
        throw numerical_error("ProfileEvaluator: branch root too close to zero");
    auto f_tail = [&](double tau) {
        double q = std::exp(tau);
        double sig = r0sq - q;
        double np = negpot(sig, -q);
        if (!(np > 0.0))
            throw numerical_error("profile quadrature: potential not negative in the tail");
        return q * std::sqrt(model_.nu(sig) / np);
    };
    tau_nodes_.resize(kTailPanels + 1);
    xq_.resize(kTailPanels + 1);
    const double tau_hi = std::log(q_hi), tau_lo = std::log(q_min);
    tau_nodes_[0] = tau_hi;
    xq_[0] = xs_.back();
    for (int k = 1; k <= kTailPanels; ++k) {
        tau_nodes_[k] = tau_hi + (tau_lo - tau_hi) * static_cast<double>(k) / kTailPanels;
        xq_[k] = xq_[k - 1] + integrate(f_tail, tau_nodes_[k], tau_nodes_[k - 1], 1e-13, 6).value;
    }
    lambda_ = 1.0 / f_tail(tau_lo);
}

double ProfileEvaluator::mu_c() const {
    return std::sqrt(std::max(0.0, model_.r0sq() + xi_c_));
}

double ProfileEvaluator::neg_potential(double eta) const {
    double sigma = model_.r0sq() + eta;
    return 4.0 * sigma * model_.F(sigma) - c_ * c_ * eta * eta;
}

double ProfileEvaluator::integrand_s(double s) const {
    double sigma = (model_.r0sq() + xi_c_) + s * s;
    double eta = xi_c_ + s * s;
    double np = 4.0 * sigma * model_.F(sigma) - c_ * c_ * eta * eta;
    return 2.0 * s * std::sqrt(model_.nu(sigma) / np);
}

double ProfileEvaluator::integrand_tau(double tau) const {
    double q = std::exp(tau);
    double sigma = model_.r0sq() - q;
    double np = 4.0 * sigma * model_.F(sigma) - c_ * c_ * q * q;
    return q * std::sqrt(model_.nu(sigma) / np);
}

double ProfileEvaluator::x_of_s(int k, double s) const {
    // sub-panel gap: smooth integrand, shallow fixed-depth quadrature suffices
    return xs_[k] +
           integrate([this](double w) { return integrand_s(w); }, s_nodes_[k], s, 1e-13, 2).value;
}

double ProfileEvaluator::x_of_tau(int k, double tau) const {
    // x increases as tau decreases
    return xq_[k] +
           integrate([this](double w) { return integrand_tau(w); }, tau, tau_nodes_[k], 1e-13, 2)
               .value;
}

ProfileEvaluator::ChartPoint ProfileEvaluator::locate(double xa) const {
    const double r0sq = model_.r0sq();
    const double mu_sq = r0sq + xi_c_;
    if (xa >= xq_.back()) {
        double q = std::exp(tau_nodes_.back() - (xa - xq_.back()) * lambda_);
        return {-q, r0sq - q};
    }
    if (xa <= xs_.back()) {
        // core chart: Newton in s from a linear seed
        int k = static_cast<int>(std::upper_bound(xs_.begin(), xs_.end(), xa) - xs_.begin()) - 1;
        k = std::clamp(k, 0, kCorePanels - 1);
        double s0 = s_nodes_[k], s1 = s_nodes_[k + 1];
        double s = (xs_[k + 1] > xs_[k])
                       ? s0 + (xa - xs_[k]) / (xs_[k + 1] - xs_[k]) * (s1 - s0)
                       : s0;
        for (int it = 0; it < 5; ++it) {
            double err = x_of_s(k, s) - xa;
            if (std::fabs(err) < 5e-13 * (1.0 + xa)) break;
            double g = integrand_s(std::max(s, 1e-300));
            if (!(g > 0.0)) break;
            s = std::clamp(s - err / g, 0.0, s_split_);
        }
        return {xi_c_ + s * s, mu_sq + s * s};
    }
    // tail chart: Newton in tau
    int k = static_cast<int>(std::upper_bound(xq_.begin(), xq_.end(), xa) - xq_.begin()) - 1;
    k = std::clamp(k, 0, kTailPanels - 1);
    double t0 = tau_nodes_[k], t1 = tau_nodes_[k + 1]; // t1 < t0
    double tau = (xq_[k + 1] > xq_[k])
                     ? t0 + (xa - xq_[k]) / (xq_[k + 1] - xq_[k]) * (t1 - t0)
                     : t0;
    for (int it = 0; it < 5; ++it) {
        double err = x_of_tau(k, tau) - xa;
        if (std::fabs(err) < 5e-13 * (1.0 + xa)) break;
        double g = -integrand_tau(tau); // dx/dtau
        tau = std::clamp(tau - err / g, tau_nodes_.back(), tau_nodes_.front());
    }
    double q = std::exp(tau);
    return {-q, r0sq - q};
}

double ProfileEvaluator::eta_at(double x) const { return locate(std::fabs(x)).eta; }

double ProfileEvaluator::amp_at(double x) const {
    ChartPoint p = locate(std::fabs(x));
    return std::sqrt(std::max(0.0, p.sigma));
}

double ProfileEvaluator::deta_dx(double x) const {
    ChartPoint p = locate(std::fabs(x));
    double np = std::max(0.0, 4.0 * p.sigma * model_.F(p.sigma) - c_ * c_ * p.eta * p.eta);
    double d = std::sqrt(np / model_.nu(p.sigma));
    return x >= 0.0 ? d : -d;
}

double ProfileEvaluator::theta_prime_at(double x) const {
    ChartPoint p = locate(std::fabs(x));
    return c_ * p.eta / (2.0 * p.sigma);
}

double ProfileEvaluator::kink_value(double x) const {
    double a = amp_at(x);
    return x >= 0.0 ? a : -a;
}

double ProfileEvaluator::kink_deriv(double x) const {
    double sigma = model_.r0sq() + eta_at(x);
    return std::sqrt(std::max(0.0, model_.F(sigma)) / model_.nu(sigma));
}

double ProfileEvaluator::kink_dderiv(double x) const {
    double u = kink_value(x);
    double sigma = u * u;
    double hp = model_.h_prime(sigma), hpp = model_.h_dprime(sigma);
    double nu = model_.nu(sigma);
    double nu_prime = 2.0 * model_.kappa * (hp * hp + 2.0 * sigma * hp * hpp);
    return -u * (model_.f(sigma) * nu + model_.F(sigma) * nu_prime) / (nu * nu);
}

namespace {

SolitonProfile build_profile(const NonlinearModel& model, double c, double x_max, int n) {
    if (n < 128) throw validation_error("profile: n >= 128 required");
    auto eval = std::make_shared<const ProfileEvaluator>(model, c);
    if (x_max <= 0.0) x_max = std::max(20.0, 30.0 / eval->lambda_tail());
    SolitonProfile p;
    p.model = model;
    p.c = c;
    p.x0 = -x_max;
    p.dx = 2.0 * x_max / (n - 1);
    p.eval = eval;
    p.mu_c = eval->mu_c();
    p.amplitude.resize(n);
    p.phase.assign(n, 0.0);
    p.eta.resize(n);
    for (int i = 0; i < n; ++i) {
        double xa = std::fabs(p.x(i));
        p.eta[i] = eval->eta_at(xa);
        p.amplitude[i] = eval->amp_at(xa);
    }
    if (c > 0.0) {
        // theta on x >= 0 by cumulative Gauss panels, then odd mirror
        auto tp = [&](double w) { return eval->theta_prime_at(w); };
        double x_prev = 0.0, th = 0.0;
        for (int i = 0; i < n; ++i) {
            double xi = p.x(i);
            if (xi < 0.0) continue;
            th += gauss4(tp, x_prev, xi);
            p.phase[i] = th;
            x_prev = xi;
        }
        for (int i = 0; i < n; ++i)
            if (p.x(i) < 0.0) p.phase[i] = -p.phase[n - 1 - i];
    }
    double cs = speed_of_sound(model);
    p.expected_decay_rate =
        std::sqrt(std::max(0.0, cs * cs - c * c) / model.nu(model.r0sq()));
    try {
        p.decay_rate = decay_rate_fit(p).first;
    } catch (const std::exception&) {
        p.decay_rate = 0.0;
    }
    return p;
}

} // namespace

cdouble SolitonProfile::value(int i) const {
    if (is_kink()) {
        double s = x(i) >= 0.0 ? 1.0 : -1.0;
        return {s * amplitude[i], 0.0};
    }
    return std::polar(amplitude[i], phase[i]);
}

double SolitonProfile::theta_at(double xq) const {
    if (is_kink()) return 0.0;
    auto tp = [&](double w) { return eval->theta_prime_at(w); };
    if (xq > x_max()) {
        // exponentially small correction beyond the grid
        double lam = eval->lambda_tail();
        double corr = tp(x_max()) * (1.0 - std::exp(-lam * (xq - x_max()))) / lam;
        return phase.back() + corr;
    }
    if (xq < x0) {
        double lam = eval->lambda_tail();
        double corr = tp(x0) * (1.0 - std::exp(-lam * (x0 - xq))) / lam;
        return phase.front() - corr;
    }
    int j = std::clamp(static_cast<int>((xq - x0) / dx), 0, n() - 1);
    return phase[j] + gauss4(tp, x(j), xq);
}

cdouble SolitonProfile::value_at(double xq) const {
    double a = eval->amp_at(xq);
    if (is_kink()) return {xq >= 0.0 ? a : -a, 0.0};
    return std::polar(a, theta_at(xq));
}

FieldState SolitonProfile::to_field() const {
    FieldState f;
    f.x0 = x0;
    f.dx = dx;
    f.r0 = model.r0;
    f.boundary = Boundary::Background;
    f.v.resize(n());
    for (int i = 0; i < n(); ++i) f.v[i] = value(i);
    return f;
}

double default_x_max(const NonlinearModel& model, double c) {
    ProfileEvaluator ev(model, c);
    return std::max(20.0, 30.0 / ev.lambda_tail());
}

SolitonProfile kink_profile(const NonlinearModel& model, double x_max, int n) {
    auto rep = check_hypotheses(model);
    if (!rep.all_pass())
        throw numerical_error("kink_profile: hypotheses H2/H3 fail for this model");
    return build_profile(model, 0.0, x_max, n);
}

SolitonProfile gray_profile(const NonlinearModel& model, double c, double x_max, int n) {
    if (!(c > 0.0)) throw validation_error("gray_profile: c must be positive");
    if (classify_existence(model, c) != Existence::GraySolitonExists)
        throw numerical_error("gray_profile: no gray soliton at this speed");
    return build_profile(model, c, x_max, n);
}

std::pair<double, double> decay_rate_fit(const SolitonProfile& profile) {
    const double xm = profile.x_max();
    const double lo = 0.3 * xm, hi = 0.8 * xm;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int i = 0; i < profile.n(); ++i) {
        double xi = profile.x(i);
        if (xi < lo || xi > hi) continue;
        double q = std::fabs(profile.eta[i]);
        if (q < 1e-14)
            throw numerical_error("decay_rate_fit: |eta| below 1e-14 in the fit window");
        double y = -std::log(q);
        sx += xi;
        sy += y;
        sxx += xi * xi;
        sxy += xi * y;
        ++m;
    }
    if (m < 8) throw numerical_error("decay_rate_fit: too few samples in the fit window");
    double rate = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return {rate, profile.expected_decay_rate};
}

FieldState sample_field(const SolitonProfile& profile, double phase_offset, double shift) {
    const int n = profile.n();
    if (std::fabs(shift) > profile.x_max() - profile.x0)
        throw validation_error("sample_field: shift outside grid range");
    std::vector<double> re(n), im(n);
    for (int i = 0; i < n; ++i) {
        cdouble w = profile.value(i);
        re[i] = w.real();
        im[i] = w.imag();
    }
    FieldState f;
    f.x0 = profile.x0;
    f.dx = profile.dx;
    f.r0 = profile.model.r0;
    f.boundary = Boundary::Background;
    f.v.resize(n);
    cdouble rot = std::polar(1.0, phase_offset);
    for (int i = 0; i < n; ++i) {
        double xs = profile.x(i) - shift;
        cdouble w(cubic_interp_uniform(re, profile.x0, profile.dx, xs),
                  cubic_interp_uniform(im, profile.x0, profile.dx, xs));
        f.v[i] = rot * w;
    }
    return f;
}

} // namespace qls
