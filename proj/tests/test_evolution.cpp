// Oracle tests for the time stepper: banded solver, right-hand side identities,
// conservation, translated-profile accuracy, modulation fitting, experiments.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qls/banded.hpp"
#include "qls/errors.hpp"
#include "qls/evolution.hpp"
#include "qls/field.hpp"
#include "qls/functionals.hpp"
#include "qls/model.hpp"
#include "qls/profile.hpp"

using namespace qls;

namespace {

FieldState constant_field(double re, double im, int n = 256, double r0 = 1.0) {
    FieldState f;
    f.x0 = -20.0;
    f.dx = 40.0 / (n - 1);
    f.r0 = r0;
    f.v.assign(n, cdouble(re, im));
    return f;
}

double sup_abs(const std::vector<cdouble>& v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

} // namespace

TEST_CASE("banded LU matches a dense oracle on random systems") {
    std::mt19937 gen(12345);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const int n = 24, kl = 2, ku = 2;
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::vector<cdouble>> dense(n, std::vector<cdouble>(n, 0.0));
        BandedLU lu(n, kl, ku);
        for (int i = 0; i < n; ++i)
            for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j) {
                cdouble a(dist(gen), dist(gen));
                if (i == j) a += 4.0; // keep the systems comfortably nonsingular
                dense[i][j] = a;
                lu.at(i, j) = a;
            }
        lu.factor();
        std::vector<cdouble> b(n), rhsv(n);
        for (int i = 0; i < n; ++i) b[i] = cdouble(dist(gen), dist(gen));
        rhsv = b;
        lu.solve(b); // b now holds x
        for (int i = 0; i < n; ++i) {
            cdouble acc = 0.0;
            for (int j = 0; j < n; ++j) acc += dense[i][j] * b[j];
            CHECK(std::abs(acc - rhsv[i]) <= 1e-10);
        }
    }
    SUBCASE("validation") {
        BandedLU lu(8, 1, 1);
        CHECK_THROWS_AS(lu.at(0, 5), validation_error);
        for (int i = 0; i < 8; ++i) lu.at(i, i) = 2.0;
        std::vector<cdouble> b(8, 1.0);
        CHECK_THROWS_AS(lu.solve(b), validation_error); // factor first
        lu.factor();
        CHECK_THROWS_AS(lu.at(0, 0), validation_error); // frozen after factor
        lu.solve(b);
        CHECK(std::abs(b[3] - 0.5) <= 1e-14);
    }
}

TEST_CASE("rhs identities") {
    auto m = builtin_model(BuiltinCase::GP1, 1.0, 0.0);
    SUBCASE("constant background gives zero") {
        auto f = constant_field(1.0, 0.0);
        CHECK(sup_abs(rhs(f, m)) <= 1e-14);
        auto g = constant_field(std::cos(0.4), std::sin(0.4));
        CHECK(sup_abs(rhs(g, m)) <= 1e-14);
    }
    SUBCASE("kink is stationary up to discretization error") {
        auto kink = kink_profile(m);
        CHECK(sup_abs(rhs(kink.to_field(), m)) <= 1e-4);
        auto m2 = builtin_model(BuiltinCase::GP2, 1.0, 1.0);
        auto kink2 = kink_profile(m2);
        CHECK(sup_abs(rhs(kink2.to_field(), m2)) <= 1e-4);
    }
    SUBCASE("gray soliton satisfies rhs = -c d_x Psi") {
        const double c = 0.5;
        auto gray = gray_profile(m, c);
        FieldState f = gray.to_field();
        auto r = rhs(f, m);
        auto dv = derivative4(f);
        double worst = 0.0;
        for (int i = 0; i < f.n(); ++i)
            worst = std::max(worst, std::abs(r[i] + c * dv[i]));
        CHECK(worst <= 1e-3);
    }
    SUBCASE("ellipticity floor breach throws with diagnostics") {
        auto bad = builtin_model(BuiltinCase::GP1, 1.0, -2.0);
        auto f = constant_field(0.9, 0.0);
        CHECK_THROWS_WITH_AS(rhs(f, bad), doctest::Contains("ellipticity"),
                             numerical_error);
    }
}

TEST_CASE("one step of background data is the identity up to solver tolerance") {
    auto m = builtin_model(BuiltinCase::GP2, 1.0, 1.0);
    auto f = constant_field(1.0, 0.0);
    EvolutionConfig cfg;
    cfg.dt = 1e-2;
    for (Scheme s : {Scheme::CrankNicolsonFixedPoint, Scheme::StrangSplit}) {
        cfg.scheme = s;
        FieldState g = step(f, m, cfg);
        double worst = 0.0;
        for (int i = 0; i < f.n(); ++i) worst = std::max(worst, std::abs(g.v[i] - f.v[i]));
        CHECK(worst <= 1e-11);
    }
}

TEST_CASE("gray soliton transport: conservation and translated-profile accuracy") {
    auto m = builtin_model(BuiltinCase::GP1, 1.0, 0.0);
    const double c = 0.5, T = 5.0;
    auto gray = gray_profile(m, c);
    FieldState f0 = gray.to_field();
    EvolutionConfig cfg;
    cfg.dt = 1e-3;
    Evolver ev(m, cfg, f0);
    const double e0 = energy(f0, m);
    const double p0 = momentum_untwisted(f0);
    ev.advance_to(T);
    const FieldState& fT = ev.state();
    CHECK(std::fabs(energy(fT, m) - e0) <= 1e-6 * std::fabs(e0));
    CHECK(std::fabs(momentum_untwisted(fT) - p0) <= 1e-6 * std::fabs(p0));
    FieldState target = sample_field(gray, 0.0, c * T);
    CHECK(distance_dX(fT, target) <= 1e-2);
    CHECK(!ev.boundary_warning());
}

TEST_CASE("per-step energy conservation on smooth data") {
    auto m = builtin_model(BuiltinCase::GP1, 1.0, 0.0);
    auto gray = gray_profile(m, 0.5);
    FieldState f = gray.to_field();
    EvolutionConfig cfg;
    cfg.dt = 1e-3;
    Evolver ev(m, cfg, f);
    double e_prev = energy(ev.state(), m);
    for (int k = 0; k < 20; ++k) {
        ev.step();
        double e = energy(ev.state(), m);
        CHECK(std::fabs(e - e_prev) <= 1e-8);
        e_prev = e;
    }
}

TEST_CASE("self-convergence of the time stepper is at least second order") {
    auto m = builtin_model(BuiltinCase::GP2, 1.0, 0.5);
    auto gray = gray_profile(m, 0.5, 20.0, 1024);
    FieldState f0 = gray.to_field();
    const double T = 0.5;
    auto run = [&](double dt) {
        EvolutionConfig cfg;
        cfg.dt = dt;
        Evolver ev(m, cfg, f0);
        ev.advance_to(T);
        return ev.state();
    };
    FieldState a = run(4e-3), b = run(2e-3), c = run(1e-3);
    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i < f0.n(); ++i) {
        e1 = std::max(e1, std::abs(a.v[i] - b.v[i]));
        e2 = std::max(e2, std::abs(b.v[i] - c.v[i]));
    }
    CHECK(e1 / e2 >= 3.0); // 4.0 expected for order 2
}

TEST_CASE("kink initial data is stationary over T=10") {
    auto m = builtin_model(BuiltinCase::GP1, 1.0, 0.0);
    auto kink = kink_profile(m);
    FieldState f0 = kink.to_field();
    EvolutionConfig cfg;
    cfg.dt = 1e-2;
    Evolver ev(m, cfg, f0);
    ev.advance_to(10.0);
    CHECK(distance_dX(ev.state(), f0) <= 1e-6);
}

TEST_CASE("ellipticity monitor triggers before non-finite values appear") {
    // kappa below kappa_tilde = -1/2: nu(1) = 1 + 2 kappa < 0 at the background
    auto bad = builtin_model(BuiltinCase::GP1, 1.0, -0.6);
    auto seed = kink_profile(builtin_model(BuiltinCase::GP1, 1.0, 0.0));
    FieldState f = seed.to_field();
    EvolutionConfig cfg;
    cfg.dt = 1e-3;
    bool threw = false;
    try {
        Evolver ev(bad, cfg, f);
        for (int k = 0; k < 1000; ++k) ev.step();
    } catch (const numerical_error& e) {
        threw = true;
        CHECK(std::string(e.what()).find("ellipticity") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("Strang splitting agrees with Crank-Nicolson") {
    auto m = builtin_model(BuiltinCase::GP1, 1.0, 0.0);
    auto gray = gray_profile(m, 0.5, 20.0, 1024);
    FieldState f0 = gray.to_field();
    EvolutionConfig cfg;
    cfg.dt = 1e-3;
    Evolver cn(m, cfg, f0);
    cfg.scheme = Scheme::StrangSplit;
    Evolver st(m, cfg, f0);
    cn.advance_to(1.0);
    st.advance_to(1.0);
    CHECK(distance_dX(cn.state(), st.state()) <= 1e-3);
    FieldState target = sample_field(gray, 0.0, 0.5);
    CHECK(distance_dX(st.state(), target) <= 1e-2);
}

TEST_CASE("modulation fit") {
    auto m = builtin_model(BuiltinCase::GP1, 1.0, 0.0);
    auto kink = kink_profile(m);
    FieldState base = kink.to_field();
    auto planted = [&](double z, double phi) {
        FieldState f = base;
        cdouble rot = std::polar(1.0, phi);
        for (int i = 0; i < f.n(); ++i)
            f.v[i] = rot * kink.eval->kink_value(f.x(i) - z);
        return f;
    };
    SUBCASE("exact orbit element is recovered to 1e-8") {
        auto fit = fit_modulation(planted(1.3, 0.7), kink);
        CHECK(std::fabs(fit.z - 1.3) <= 1e-8);
        CHECK(std::fabs(fit.phi - 0.7) <= 1e-8);
        CHECK(fit.d0 <= 1e-8);
    }
    SUBCASE("unmodulated kink gives (0, 0)") {
        auto fit = fit_modulation(base, kink);
        CHECK(std::fabs(fit.z) <= 1e-8);
        CHECK(std::fabs(fit.phi) <= 1e-8);
        CHECK(fit.d0 <= 1e-8);
    }
    SUBCASE("warm start is honored") {
        double z0 = 1.25, p0 = 0.72;
        auto fit = fit_modulation(planted(1.3, 0.7), kink, 1e9, &z0, &p0);
        CHECK(std::fabs(fit.z - 1.3) <= 1e-8);
        CHECK(std::fabs(fit.phi - 0.7) <= 1e-8);
    }
    SUBCASE("small bump moves the fit by less than 1e-2") {
        FieldState f = planted(1.3, 0.7);
        for (int i = 0; i < f.n(); ++i) {
            double x = f.x(i);
            f.v[i] += 1e-3 * std::exp(-0.5 * (x - 0.4) * (x - 0.4));
        }
        auto fit = fit_modulation(f, kink);
        CHECK(std::fabs(fit.z - 1.3) <= 1e-2);
        CHECK(std::fabs(fit.phi - 0.7) <= 1e-2);
    }
    SUBCASE("capture radius is enforced") {
        FieldState f = base;
        for (int i = 0; i < f.n(); ++i) {
            double x = f.x(i);
            f.v[i] += 0.1 * std::exp(-0.5 * x * x) * cdouble(1.0, 1.0);
        }
        CHECK_THROWS_AS(fit_modulation(f, kink, 1e-3), numerical_error);
    }
    SUBCASE("gray reference is rejected") {
        auto gray = gray_profile(m, 0.5);
        CHECK_THROWS_AS(fit_modulation(base, gray), validation_error);
    }
}

TEST_CASE("orbital stability experiment") {
    auto m = builtin_model(BuiltinCase::GP1, 1.0, 0.0);
    EvolutionConfig cfg;
    cfg.dt = 1e-2;
    cfg.output_cadence = 0.5;
    SUBCASE("zero amplitude stays on the orbit") {
        auto trace = orbital_stability_experiment(m, 0.0, 2.0, cfg);
        REQUIRE(trace.times.size() == trace.dX_modulated.size());
        for (double d : trace.dX_modulated) CHECK(d <= 1e-6);
        CHECK(!trace.growth_flag);
    }
    SUBCASE("stable-slope run keeps the modulated distance bounded") {
        auto trace = orbital_stability_experiment(m, 1e-2, 5.0, cfg);
        REQUIRE(!trace.dX_modulated.empty());
        CHECK(trace.initial_dX > 0.0);
        double dmax = 0.0;
        for (double d : trace.dX_modulated) dmax = std::max(dmax, d);
        CHECK(dmax <= 10.0 * trace.initial_dX);
        CHECK(!trace.growth_flag);
        CHECK(!trace.boundary_warning);
        for (size_t i = 0; i < trace.min_nu.size(); ++i) CHECK(trace.min_nu[i] > 0.9);
        for (size_t i = 1; i < trace.times.size(); ++i)
            CHECK(trace.times[i] > trace.times[i - 1]);
    }
}

TEST_CASE("config validation") {
    EvolutionConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
    cfg.dt = 1e-3;
    cfg.max_inner_iters = 0;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
}
