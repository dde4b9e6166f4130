#include "qls/criterion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "qls/branch.hpp"
#include "qls/errors.hpp"
#include "qls/quad.hpp"
#include "qls/roots.hpp"

namespace qls {

namespace {

Verdict verdict_from(double value, double tol) {
    if (value < -tol) return Verdict::StableSlope;
    if (value > tol) return Verdict::UnstableSlope;
    return Verdict::Inconclusive;
}

} // namespace

CriterionReport vk_slope_integral(const NonlinearModel& model) {
    auto hyp = check_hypotheses(model);
    if (!hyp.all_pass())
        throw numerical_error("vk_slope_integral: hypotheses H2/H3 fail");
    const double r0 = model.r0, r0sq = model.r0sq();
    const double f0 = model.F(0.0);
    if (!(f0 > 0.0)) throw numerical_error("vk_slope_integral: F(0) must be positive");
    const double inv_sqrt_f0 = 1.0 / std::sqrt(f0);
    auto g = [&](double r) {
        double sigma = r * r;
        double d = sigma - r0sq;
        return (d * d / sigma) *
               (std::sqrt(model.nu(sigma) / model.F(sigma)) - inv_sqrt_f0);
    };
    // inner part: the apparent r^-2 singularity cancels analytically
    auto inner = integrate(g, 0.0, 0.5 * r0, 1e-12);
    // endpoint part via r = r0 - s^2 (0/0 at r = r0 otherwise)
    auto outer = integrate([&](double s) { return 2.0 * s * g(r0 - s * s); }, 0.0,
                           std::sqrt(0.5 * r0), 1e-12);
    CriterionReport rep;
    rep.method = SlopeMethod::IntegralFormula;
    rep.kappa = model.kappa;
    rep.model_id = model.id;
    rep.p_prime_0 = -8.0 * r0 * r0sq * inv_sqrt_f0 / 3.0 + inner.value + outer.value;
    rep.tolerance = std::max(1e-12, 10.0 * (inner.error + outer.error));
    rep.verdict = verdict_from(rep.p_prime_0, rep.tolerance);
    return rep;
}

CriterionReport vk_slope_branch_fd(const NonlinearModel& model, double c_step) {
    if (!(c_step > 0.0))
        throw validation_error("vk_slope_branch_fd: c_step must be positive");
    const double pr = model.r0sq() * M_PI;
    auto s = [&](double c) { return (branch_momentum(model, c) - pr) / c; };
    double s1 = s(c_step), s2 = s(0.5 * c_step);
    CriterionReport rep;
    rep.method = SlopeMethod::BranchFiniteDifference;
    rep.kappa = model.kappa;
    rep.model_id = model.id;
    rep.p_prime_0 = 2.0 * s2 - s1; // removes the O(c) term of s(c)
    rep.tolerance = std::max(1e-10, std::fabs(s2 - s1));
    rep.verdict = verdict_from(rep.p_prime_0, rep.tolerance);
    return rep;
}

double gp_closed_form_slope(double c, double kappa) {
    if (!(kappa > -0.5))
        throw validation_error("gp_closed_form_slope: require kappa > -1/2");
    if (!(c >= 0.0 && c < std::sqrt(2.0)))
        throw validation_error("gp_closed_form_slope: require 0 <= c < sqrt(2)");
    const double q = 2.0 - c * c;
    if (kappa == 0.0) return -std::sqrt(q); // analytic limit of both branches
    const double tail = -(3.0 * q / 4.0) * std::sqrt((1.0 + 2.0 * kappa) / q);
    const double a = std::sqrt(std::fabs(kappa));
    const double arg = a * std::sqrt(q / (1.0 + 2.0 * kappa));
    const double coef = -(3.0 * c * c * kappa - 4.0 * kappa + 1.0) / (4.0 * a);
    // kappa > 0 requires the inverse-hyperbolic continuation of the arctangent
    // form printed for -1/2 < kappa < 0 (same Taylor germ at kappa = 0)
    double lead = (kappa > 0.0) ? coef * std::atanh(arg) : coef * std::atan(arg);
    return lead + tail;
}

double find_kappa0() {
    return brent_root([](double k) { return gp_closed_form_slope(0.0, k); }, 1.0, 10.0,
                      1e-9);
}

std::vector<SweepRow> sweep_kappa(const std::function<NonlinearModel(double)>& family,
                                  const std::vector<double>& kappa_grid) {
    std::vector<SweepRow> rows(kappa_grid.size());
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QLS_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) hw = static_cast<unsigned>(v);
    }
    hw = std::min<unsigned>(hw, std::max<size_t>(1, kappa_grid.size()));
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < kappa_grid.size(); i = next.fetch_add(1)) {
            SweepRow& row = rows[i];
            row.kappa = kappa_grid[i];
            try {
                auto rep = vk_slope_integral(family(kappa_grid[i]));
                row.p_prime_0 = rep.p_prime_0;
                row.verdict = rep.verdict;
                row.ok = true;
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < hw; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return rows;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::StableSlope: return "StableSlope";
        case Verdict::UnstableSlope: return "UnstableSlope";
        default: return "Inconclusive";
    }
}

const char* to_string(SlopeMethod m) {
    switch (m) {
        case SlopeMethod::IntegralFormula: return "IntegralFormula";
        case SlopeMethod::BranchFiniteDifference: return "BranchFiniteDifference";
        default: return "GPClosedForm";
    }
}

} // namespace qls
