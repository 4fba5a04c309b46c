#include <doctest.h>

#include <cmath>

#include "bhtlab/rates.hpp"

using namespace bht;

TEST_CASE("fit_rate recovers power laws") {
    const std::vector<double> ladder = default_eps_ladder(8);

    std::vector<double> v1, v2, v0;
    for (double e : ladder) {
        v1.push_back(e);
        v2.push_back(e * e);
        v0.push_back(3.7);
    }
    const RateFit f1 = fit_rate(ladder, v1);
    CHECK(f1.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f1.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit_rate(ladder, v2).slope == doctest::Approx(2.0).epsilon(1e-12));
    const RateFit f0 = fit_rate(ladder, v0);
    CHECK(f0.slope == doctest::Approx(0.0));
    CHECK(f0.r_squared == doctest::Approx(1.0));
}

TEST_CASE("fit_rate floors converged values") {
    const std::vector<double> ladder = default_eps_ladder(6);
    std::vector<double> vals = {1e-2, 1e-4, 1e-17, 0.0, 1e-18, 1e-16};
    const RateFit fit = fit_rate(ladder, vals);
    CHECK(fit.points_used == 2); // only the two above the floor
    CHECK_FALSE(fit.degenerate);

    std::vector<double> dead(6, 0.0);
    CHECK(fit_rate(ladder, dead).degenerate);

    CHECK_THROWS_AS(fit_rate({0.1, 0.2, 0.1, 0.05}, vals), ParamError); // not decreasing
    CHECK_THROWS_AS(fit_rate({0.1, 0.05, 0.025}, {1.0, 2.0, 3.0}), ParamError); // too short
}

TEST_CASE("extrapolate exact on model data") {
    const std::vector<double> ladder = default_eps_ladder(10);
    std::vector<double> lin, quad;
    for (double e : ladder) {
        lin.push_back(3.0 + 2.0 * e);
        quad.push_back(3.0 + e + 5.0 * e * e);
    }
    const Extrapolation a = extrapolate(ladder, lin);
    CHECK(std::fabs(a.limit - 3.0) < 1e-12);
    CHECK(a.reliable);
    const Extrapolation b = extrapolate(ladder, quad);
    CHECK(std::fabs(b.limit - 3.0) < 1e-12);
    CHECK(b.reliable);
}

TEST_CASE("extrapolate flags unreliable fits") {
    const std::vector<double> ladder = default_eps_ladder(8);
    std::vector<double> osc;
    for (std::size_t i = 0; i < ladder.size(); ++i)
        osc.push_back(i % 2 == 0 ? 1.0 : -1.0);
    CHECK_FALSE(extrapolate(ladder, osc).reliable);

    CHECK_THROWS_AS(extrapolate({0.1, 0.05, 0.025, 0.0125}, {1, 2, 3, 4}), ParamError);
}

TEST_CASE("default ladder") {
    const auto ladder = default_eps_ladder();
    REQUIRE(ladder.size() == 10);
    CHECK(ladder.front() == 0.1);
    for (std::size_t i = 1; i < ladder.size(); ++i)
        CHECK(ladder[i] == doctest::Approx(0.5 * ladder[i - 1]).epsilon(1e-15));
}
