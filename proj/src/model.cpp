#include "qls/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "qls/errors.hpp"
#include "qls/expr.hpp"
#include "qls/quad.hpp"
#include "qls/roots.hpp"

namespace qls {

namespace {

std::string case_name(BuiltinCase c) {
    switch (c) {
        case BuiltinCase::GP1: return "GP1";
        case BuiltinCase::GP2: return "GP2";
        case BuiltinCase::SF3: return "SF3";
    }
    return "?";
}

std::string make_id(const std::string& base, double r0, double kappa) {
    std::ostringstream os;
    os << base << "(r0=" << r0 << ",kappa=" << kappa << ")";
    return os.str();
}

} // namespace

NonlinearModel builtin_model(BuiltinCase case_id, double r0, double kappa) {
    if (!(r0 > 0.0)) throw validation_error("builtin_model: r0 must be positive");
    NonlinearModel m;
    m.r0 = r0;
    m.kappa = kappa;
    const double r0sq = r0 * r0;
    switch (case_id) {
        case BuiltinCase::GP1:
        case BuiltinCase::GP2:
            // GP nonlinearity with background r0: f(r0^2)=0 by construction;
            // the classical 1-s at r0=1.
            m.f = [r0sq](double s) { return r0sq - s; };
            m.f_prime = [](double) { return -1.0; };
            m.F = [r0sq](double s) { return 0.5 * (r0sq - s) * (r0sq - s); };
            break;
        case BuiltinCase::SF3: {
            const double A = 1.0 + r0sq; // f = (A/(1+s))^3 - 1
            m.f = [A](double s) {
                double q = A / (1.0 + s);
                return q * q * q - 1.0;
            };
            m.f_prime = [A](double s) {
                double b = 1.0 + s;
                return -3.0 * A * A * A / (b * b * b * b);
            };
            // F(s) = d^2 (3A+2d) / (2(A+d)^2) with d = s - r0^2 (exact
            // rearrangement of the antiderivative; no cancellation at s=r0^2).
            m.F = [A, r0sq](double s) {
                double d = s - r0sq;
                double B = A + d;
                return d * d * (3.0 * A + 2.0 * d) / (2.0 * B * B);
            };
            break;
        }
        default:
            throw validation_error("builtin_model: unknown case id");
    }
    if (case_id == BuiltinCase::GP2) {
        m.h = [](double s) { return std::sqrt(1.0 + s); };
        m.h_prime = [](double s) { return 0.5 / std::sqrt(1.0 + s); };
        m.h_dprime = [](double s) {
            double b = 1.0 + s;
            return -0.25 / (b * std::sqrt(b));
        };
    } else {
        m.h = [](double s) { return s; };
        m.h_prime = [](double) { return 1.0; };
        m.h_dprime = [](double) { return 0.0; };
    }
    m.id = make_id(case_name(case_id), r0, kappa);
    if (std::fabs(m.f(r0sq)) > 1e-12 * (1.0 + std::fabs(r0sq)))
        throw validation_error("builtin_model: f(r0^2) != 0");
    return m;
}

NonlinearModel custom_model(const std::string& f_expr, const std::string& h_expr,
                            double r0, double kappa) {
    if (!(r0 > 0.0)) throw validation_error("custom_model: r0 must be positive");
    NonlinearModel m;
    m.r0 = r0;
    m.kappa = kappa;
    m.f = compile_expression(f_expr);
    m.h = compile_expression(h_expr);
    ScalarFn f = m.f, h = m.h;
    // centered finite-difference fallbacks, step scaled by (1+s)
    m.f_prime = [f](double s) {
        double e = 1e-6 * (1.0 + std::fabs(s));
        return (f(s + e) - f(s - e)) / (2.0 * e);
    };
    m.h_prime = [h](double s) {
        double e = 1e-6 * (1.0 + std::fabs(s));
        return (h(s + e) - h(s - e)) / (2.0 * e);
    };
    m.h_dprime = [h](double s) {
        double e = 3e-5 * (1.0 + std::fabs(s));
        return (h(s + e) - 2.0 * h(s) + h(s - e)) / (e * e);
    };
    const double r0sq = r0 * r0;
    m.F = [f, r0sq](double s) {
        return integrate([&f](double w) { return f(w); }, s, r0sq, 1e-13).value;
    };
    m.id = make_id("custom[f=" + f_expr + ",h=" + h_expr + "]", r0, kappa);
    if (std::fabs(m.f(r0sq)) > 1e-9 * (1.0 + std::fabs(r0sq)))
        throw validation_error("custom_model: f(r0^2) must vanish (background condition)");
    return m;
}

NonlinearModel model_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw validation_error(std::string("model descriptor: bad JSON: ") + e.what());
    }
    if (!j.contains("case")) throw validation_error("model descriptor: missing \"case\"");
    std::string cs = j["case"].get<std::string>();
    double r0 = j.value("r0", 1.0);
    double kappa = j.value("kappa", 0.0);
    if (cs == "GP1") return builtin_model(BuiltinCase::GP1, r0, kappa);
    if (cs == "GP2") return builtin_model(BuiltinCase::GP2, r0, kappa);
    if (cs == "SF3") return builtin_model(BuiltinCase::SF3, r0, kappa);
    if (cs == "custom") {
        if (!j.contains("f") || !j.contains("h"))
            throw validation_error("model descriptor: custom case needs \"f\" and \"h\"");
        return custom_model(j["f"].get<std::string>(), j["h"].get<std::string>(), r0, kappa);
    }
    throw validation_error("model descriptor: unknown case \"" + cs + "\"");
}

double speed_of_sound(const NonlinearModel& model, bool* degenerate) {
    double fp = model.f_prime(model.r0sq());
    if (degenerate) *degenerate = false;
    if (fp > 1e-14)
        throw validation_error("speed_of_sound: f'(r0^2) > 0 (defocusing assumption violated)");
    if (fp > -1e-14) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    return std::sqrt(-2.0 * fp);
}

double kappa_tilde(const NonlinearModel& model, bool* vacuous) {
    const double r0sq = model.r0sq();
    const int n = 512;
    auto g = [&](double s) {
        double hp = model.h_prime(s);
        return -1.0 / (2.0 * s * hp * hp);
    };
    if (vacuous) *vacuous = false;
    double best_s = r0sq, best = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n; ++i) {
        double s = r0sq * static_cast<double>(i) / n;
        if (std::fabs(model.h_prime(s)) < 1e-12) {
            if (vacuous) *vacuous = true;
            return -std::numeric_limits<double>::infinity();
        }
        double v = g(s);
        if (v > best) {
            best = v;
            best_s = s;
        }
    }
    double lo = std::max(r0sq / (2.0 * n), best_s - r0sq / n);
    double hi = std::min(r0sq, best_s + r0sq / n);
    double s_star = golden_max(g, lo, hi, 1e-13 * r0sq);
    return std::max({best, g(s_star), g(r0sq)});
}

HypothesisReport check_hypotheses(const NonlinearModel& model, int grid_n) {
    if (grid_n < 64) throw validation_error("check_hypotheses: grid_n >= 64 required");
    HypothesisReport rep;
    const double r0sq = model.r0sq();

    // H2: nu > 0 on [0, r0^2], Chebyshev-distributed samples
    rep.h2_margin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < grid_n; ++j) {
        double t = 0.5 * (1.0 - std::cos(M_PI * j / (grid_n - 1)));
        double s = r0sq * t;
        double v = model.nu(s);
        if (v < rep.h2_margin) {
            rep.h2_margin = v;
            rep.h2_worst_sigma = s;
        }
    }
    rep.h2_ellipticity = rep.h2_margin > 0.0;

    // H3: F > 0 on [0, r0^2) and F''(r0^2) > 0
    rep.h3_margin = std::numeric_limits<double>::infinity();
    for (int j = 0; j + 1 < grid_n; ++j) {
        double t = 0.5 * (1.0 - std::cos(M_PI * j / (grid_n - 1)));
        double s = r0sq * t;
        double v = model.F(s);
        if (v < rep.h3_margin) {
            rep.h3_margin = v;
            rep.h3_worst_sigma = s;
        }
    }
    {
        double e = 1e-4 * std::max(1.0, r0sq);
        rep.h3_fpp_at_r0sq =
            (model.F(r0sq + e) - 2.0 * model.F(r0sq) + model.F(r0sq - e)) / (e * e);
    }
    rep.h3_potential = rep.h3_margin > 0.0 && rep.h3_fpp_at_r0sq > 0.0;

    rep.kappa_tilde = kappa_tilde(model, &rep.kappa_tilde_vacuous);

    // amplitude cap: largest xi in (0, r0^2] with F>0 and nu>0 on
    // (r0^2, r0^2+xi], located by bisection on a sampled predicate
    auto ok = [&](double xi) {
        const int k = 64;
        for (int i = 1; i <= k; ++i) {
            double s = r0sq + xi * static_cast<double>(i) / k;
            if (!(model.F(s) > 0.0) || !(model.nu(s) > 0.0)) return false;
        }
        return true;
    };
    if (ok(r0sq)) {
        rep.xi_tilde = r0sq; // default cap policy: never exceed r0^2
    } else {
        double lo = 0.0, hi = r0sq;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            (ok(mid) ? lo : hi) = mid;
        }
        rep.xi_tilde = lo;
    }
    return rep;
}

} // namespace qls
