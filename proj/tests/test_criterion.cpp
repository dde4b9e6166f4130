// Oracle tests for the stability-slope criterion: integral formula, branch
// finite differences, closed form for the cubic defocusing case, kappa sweeps.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qls/branch.hpp"
#include "qls/criterion.hpp"
#include "qls/errors.hpp"
#include "qls/model.hpp"

using namespace qls;

TEST_CASE("integral slope: cubic defocusing oracle and kappa behavior") {
    SUBCASE("kappa=0 gives -2 sqrt(2)") {
        auto m = builtin_model(BuiltinCase::GP1, 1.0, 0.0);
        auto rep = vk_slope_integral(m);
        CHECK(rep.p_prime_0 == doctest::Approx(-2.0 * std::sqrt(2.0)).epsilon(1e-6));
        CHECK(rep.verdict == Verdict::StableSlope);
    }
    SUBCASE("large kappa flips the sign") {
        auto m = builtin_model(BuiltinCase::GP1, 1.0, 50.0);
        auto rep = vk_slope_integral(m);
        CHECK(rep.p_prime_0 > 0.0);
        CHECK(rep.verdict == Verdict::UnstableSlope);
    }
    SUBCASE("strictly increasing in kappa") {
        double prev = -1e300;
        for (double k : {-0.4, -0.2, 0.0, 1.0, 2.0, 4.0, 8.0}) {
            auto rep = vk_slope_integral(builtin_model(BuiltinCase::GP1, 1.0, k));
            CHECK(rep.p_prime_0 > prev);
            prev = rep.p_prime_0;
        }
    }
}

TEST_CASE("branch finite-difference slope cross-validates the integral formula") {
    for (auto bc : {BuiltinCase::GP1, BuiltinCase::GP2, BuiltinCase::SF3}) {
        for (double kappa : {0.0, 1.0}) {
            auto m = builtin_model(bc, 1.0, kappa);
            CAPTURE((int)bc);
            CAPTURE(kappa);
            auto a = vk_slope_integral(m);
            auto b = vk_slope_branch_fd(m, 0.05);
            CHECK(std::fabs(a.p_prime_0 - b.p_prime_0) <= 1e-3);
        }
    }
}

TEST_CASE("momentum limit and Hamilton relation along the branch") {
    auto m = builtin_model(BuiltinCase::GP2, 1.0, 1.0);
    SUBCASE("P(c) -> pi r0^2 as c -> 0") {
        CHECK(std::fabs(branch_momentum(m, 1e-3) - M_PI) <= 1e-2);
    }
    SUBCASE("dE/dc = c dP/dc at c=0.2") {
        const double h = 0.01, c = 0.2;
        double dE = (branch_energy(m, c + h) - branch_energy(m, c - h)) / (2.0 * h);
        double dP = (branch_momentum(m, c + h) - branch_momentum(m, c - h)) / (2.0 * h);
        CHECK(std::fabs(dE - c * dP) <= 1e-3);
    }
    SUBCASE("energy expansion: (E(c)-E(0))/(c^2/2) ~ P'(0)") {
        double c = 0.05;
        double lhs = (branch_energy(m, c) - kink_energy_closed(m)) / (0.5 * c * c);
        double rhs = vk_slope_integral(m).p_prime_0;
        CHECK(lhs == doctest::Approx(rhs).epsilon(0.05));
    }
}

TEST_CASE("closed-form slope for the cubic defocusing case") {
    SUBCASE("values") {
        double v1 = gp_closed_form_slope(0.0, 1.0);
        double want = 0.75 * std::atanh(std::sqrt(2.0 / 3.0)) - 1.5 * std::sqrt(1.5);
        CHECK(v1 == doctest::Approx(want).epsilon(1e-12));
        CHECK(gp_closed_form_slope(0.0, 1e-9) ==
              doctest::Approx(-std::sqrt(2.0)).epsilon(1e-4));
        CHECK(gp_closed_form_slope(0.0, 0.0) ==
              doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
        CHECK(gp_closed_form_slope(0.0, -1e-9) ==
              doctest::Approx(-std::sqrt(2.0)).epsilon(1e-4));
    }
    SUBCASE("integral formula carries exactly twice the closed-form normalization") {
        for (double k : {-0.3, 0.5, 1.0, 2.0, 3.0}) {
            auto m = builtin_model(BuiltinCase::GP1, 1.0, k);
            double ratio = vk_slope_integral(m).p_prime_0 / gp_closed_form_slope(0.0, k);
            CHECK(ratio == doctest::Approx(2.0).epsilon(1e-3));
        }
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(gp_closed_form_slope(0.0, -0.5), validation_error);
        CHECK_THROWS_AS(gp_closed_form_slope(1.5, 1.0), validation_error);
        CHECK_THROWS_AS(gp_closed_form_slope(-0.1, 1.0), validation_error);
    }
}

TEST_CASE("kappa0 root") {
    double k0 = find_kappa0();
    CHECK(k0 == doctest::Approx(3.636).epsilon(0).scale(0).epsilon(0.01 / 3.636));
    CHECK(gp_closed_form_slope(0.0, k0 - 0.5) < 0.0);
    CHECK(gp_closed_form_slope(0.0, k0 + 0.5) > 0.0);
    // exactly one sign change of the closed form on [1, 10]
    int changes = 0;
    double prev = gp_closed_form_slope(0.0, 1.0);
    for (int i = 1; i <= 90; ++i) {
        double v = gp_closed_form_slope(0.0, 1.0 + 0.1 * i);
        if (prev < 0.0 && v >= 0.0) ++changes;
        if (prev > 0.0 && v <= 0.0) ++changes;
        prev = v;
    }
    CHECK(changes == 1);
}

TEST_CASE("kappa sweep") {
    auto family = [](double k) { return builtin_model(BuiltinCase::GP1, 1.0, k); };
    std::vector<double> grid = {-0.6, -0.45, -0.3, -0.1, 0.0, 0.5, 1.0};
    auto rows = sweep_kappa(family, grid);
    REQUIRE(rows.size() == grid.size());
    CHECK_FALSE(rows[0].ok); // kappa <= kappa_tilde: recorded error, sweep continues
    CHECK(!rows[0].error.empty());
    double prev = -1e300;
    for (size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].ok);
        CHECK(rows[i].p_prime_0 > prev);
        prev = rows[i].p_prime_0;
    }
}
