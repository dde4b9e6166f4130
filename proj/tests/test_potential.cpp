#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qls/errors.hpp"
#include "qls/model.hpp"
#include "qls/potential.hpp"

using namespace qls;

TEST_CASE("potential pointwise values") {
    auto gp1 = builtin_model(BuiltinCase::GP1, 1.0, 0.0);
    auto s0 = make_slice(gp1, 0.0);
    // V_0(xi) = -2 xi^2 (1+xi) for the GP case at r0=1
    CHECK(potential_eval(s0, -0.5) == doctest::Approx(-0.25).epsilon(1e-13));
    CHECK(potential_eval(s0, 0.0) == doctest::Approx(0.0).epsilon(1e-14));

    for (auto c : {BuiltinCase::GP1, BuiltinCase::GP2, BuiltinCase::SF3}) {
        for (double r0 : {1.0, 2.0}) {
            auto m = builtin_model(c, r0, 0.7);
            double r0sq = m.r0sq();
            CHECK(potential_eval(m, 0.4, 0.0) == doctest::Approx(0.0).epsilon(1e-13));
            CHECK(potential_eval(m, 0.3, -r0sq) ==
                  doctest::Approx(0.09 * r0sq * r0sq).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(potential_eval(gp1, 0.0, -1.5), validation_error);
}

TEST_CASE("branch root: GP factorization oracle") {
    auto gp1 = builtin_model(BuiltinCase::GP1, 1.0, 0.0);
    // V_c(xi) = xi^2 (c^2 - 2 - 2 xi), so xi(c) = (c^2-2)/2
    CHECK(branch_root(gp1, 0.0).xi_c == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(branch_root(gp1, 1.0).xi_c == doctest::Approx(-0.5).epsilon(1e-12));
    for (double c : {0.2, 0.5, 0.9, 1.2})
        CHECK(branch_root(gp1, c).xi_c ==
              doctest::Approx((c * c - 2.0) / 2.0).epsilon(1e-11));
    CHECK_THROWS_AS(branch_root(gp1, 1.5), numerical_error); // beyond c_s
    CHECK_THROWS_AS(branch_root(gp1, 0.96 * std::sqrt(2.0)), validation_error);
}

TEST_CASE("branch root: residual and structure for all builtins") {
    for (auto cid : {BuiltinCase::GP1, BuiltinCase::GP2, BuiltinCase::SF3}) {
        for (double kappa : {0.0, 1.0}) {
            auto m = builtin_model(cid, 1.0, kappa);
            double cs = speed_of_sound(m);
            for (double frac : {0.1, 0.4, 0.8}) {
                auto r = branch_root(m, frac * cs);
                CHECK(r.valid);
                CHECK(r.xi_c < 0.0);
                CHECK(r.xi_c > -m.r0sq());
                CHECK(std::fabs(potential_eval(m, frac * cs, r.xi_c)) <=
                      1e-12 * std::max(1.0, frac * frac * cs * cs));
                CHECK(r.vc_prime_at_root < 0.0);
            }
        }
    }
}

TEST_CASE("branch root: speed-derivative relation and monotone mu_c") {
    for (auto cid : {BuiltinCase::GP1, BuiltinCase::GP2, BuiltinCase::SF3}) {
        auto m = builtin_model(cid, 1.0, cid == BuiltinCase::GP2 ? 1.0 : 0.5);
        double cs = speed_of_sound(m);
        double c = 0.5 * cs, dc = 1e-4;
        double xi = branch_root(m, c).xi_c;
        double dxi = (branch_root(m, c + dc).xi_c - branch_root(m, c - dc).xi_c) / (2.0 * dc);
        double resid = 2.0 * c * xi * xi + potential_deriv(m, c, xi) * dxi;
        CHECK(std::fabs(resid) <= 1e-5);

        double prev = 0.0;
        for (int i = 1; i <= 10; ++i) {
            double cc = 0.5 * cs * i / 10.0;
            double mu2 = m.r0sq() + branch_root(m, cc).xi_c;
            CHECK(mu2 > prev);
            prev = mu2;
        }
    }
}

TEST_CASE("potential Taylor coefficient at xi=0") {
    for (auto cid : {BuiltinCase::GP1, BuiltinCase::GP2, BuiltinCase::SF3}) {
        auto m = builtin_model(cid, 1.0, 0.3);
        double cs = speed_of_sound(m);
        double c = 0.4, xi = -1e-4;
        CHECK(potential_eval(m, c, xi) / (xi * xi) ==
              doctest::Approx(c * c - cs * cs).epsilon(1e-3));
    }
}

TEST_CASE("existence classification") {
    auto gp1 = builtin_model(BuiltinCase::GP1, 1.0, 0.0);
    CHECK(classify_existence(gp1, 0.0) == Existence::KinkExists);
    CHECK(classify_existence(gp1, 0.7) == Existence::GraySolitonExists);
    CHECK(classify_existence(gp1, 2.0) == Existence::TrivialOnly);
    // ellipticity breach inside the profile range blocks the gray family
    auto bad = builtin_model(BuiltinCase::GP1, 1.0, -0.6);
    CHECK(classify_existence(bad, 0.0) == Existence::TrivialOnly);
}

TEST_CASE("delta estimate is a usable speed") {
    auto m = builtin_model(BuiltinCase::GP1, 1.0, 1.0);
    auto r = branch_root(m, 0.2, true, /*estimate_delta=*/true);
    CHECK(r.delta_estimate > 0.0);
    CHECK(r.delta_estimate <= 0.95 * speed_of_sound(m));
    CHECK_NOTHROW(branch_root(m, r.delta_estimate));
}

TEST_CASE("gray soliton minimum amplitude: mu_c oracle") {
    auto gp1 = builtin_model(BuiltinCase::GP1, 1.0, 0.0);
    double mu = std::sqrt(1.0 + branch_root(gp1, 1.0).xi_c);
    CHECK(mu == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}
