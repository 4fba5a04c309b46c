#include <doctest.h>

#include <cmath>
#include <random>

#include "bhtlab/lebesgue.hpp"
#include "support/oracles.hpp"

using namespace bht;

namespace {

std::vector<double> radius_ladder(int n = 10, double first = 0.2) {
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) {
        r[i] = first;
        first *= 0.5;
    }
    return r;
}

// frozen closed form: 2*0.1/sqrt(3) - 0.1
constexpr double kNestingMarginLinear = 0.015470053837925146;

} // namespace

TEST_CASE("theta closed forms") {
    const RealFn linear = [](double t) { return t; };
    // (1/r) integral of t^2 over |t| < r = 2 r^2 / 3
    CHECK(theta(linear, 0.0, 0.1, 2.0) == doctest::Approx(2.0 * 0.01 / 3.0).epsilon(1e-12));
    CHECK(theta(linear, 0.0, 0.1, 1.0) == doctest::Approx(0.1).epsilon(1e-12));

    const RealFn jump = make_function(sign_jump_spec(0.0));
    for (double r : {0.5, 0.1, 1e-3})
        CHECK(theta(jump, 0.0, r, 1.0) == doctest::Approx(2.0).epsilon(1e-12));

    // Lipschitz bound theta <= 2 L^p r^p/(p+1): cusp beta=1 has L=1 and
    // attains it at the cusp point
    const RealFn cusp = make_function(power_cusp_spec(0.0, 1.0));
    CHECK(theta(cusp, 0.0, 0.05, 1.0) <= 0.05 + 1e-12);

    CHECK_THROWS_AS(theta(linear, 0.0, -0.1, 1.0), ParamError);
    CHECK_THROWS_AS(theta(linear, 0.0, 0.1, 0.5), ParamError);
}

TEST_CASE("theta scaling homogeneity") {
    const RealFn f = make_function(gaussian_spec(0.0, 1.0));
    const double base = theta(f, 0.3, 0.08, 1.7);
    for (double c : {-2.0, 0.0, 3.0}) {
        const RealFn scaled = [f, c](double t) { return c * f(t); };
        const double got = theta(scaled, 0.3, 0.08, 1.7);
        const double want = std::pow(std::fabs(c), 1.7) * base;
        CHECK(std::fabs(got - want) <= 1e-12 * std::max(1.0, want));
    }
}

TEST_CASE("lebesgue_profile classification") {
    SUBCASE("smooth point: slope ~ p for p=2") {
        const RealFn f = make_function(gaussian_spec(0.0, 1.0));
        const ThetaProfile prof = lebesgue_profile(f, 0.3, 2.0, radius_ladder());
        CHECK(prof.classification == LebesgueClass::LebesguePoint);
        CHECK(prof.fitted_slope == doctest::Approx(2.0).epsilon(0.05));
    }

    SUBCASE("jump point: flat profile at 2") {
        const RealFn f = make_function(sign_jump_spec(0.0));
        const ThetaProfile prof = lebesgue_profile(f, 0.0, 1.0, radius_ladder());
        CHECK(prof.classification == LebesgueClass::NotLebesgue);
        CHECK(std::fabs(prof.fitted_slope) < 0.05);
        CHECK(prof.theta.back() == doctest::Approx(2.0).epsilon(1e-9));
    }

    SUBCASE("cusp point: slope beta for p=1") {
        // theta ~ (4/3) sqrt(r) decays slowly; the ladder must reach
        // r ~ 4e-7 before theta crosses the classification threshold
        const RealFn f = make_function(power_cusp_spec(0.0, 0.5));
        const ThetaProfile prof = lebesgue_profile(f, 0.0, 1.0, radius_ladder(20));
        CHECK(prof.classification == LebesgueClass::LebesguePoint);
        CHECK(prof.fitted_slope == doctest::Approx(0.5).epsilon(0.02));
        // closed form (4/3) sqrt(r)
        CHECK(prof.theta.front() ==
              doctest::Approx(4.0 / 3.0 * std::sqrt(0.2)).epsilon(1e-10));
    }

    SUBCASE("ladder validation") {
        const RealFn f = make_function(gaussian_spec(0.0, 1.0));
        CHECK_THROWS_AS(lebesgue_profile(f, 0.0, 2.0, {0.1, 0.05, 0.025, 0.0125, 0.00625}),
                        ParamError);
    }
}

TEST_CASE("check_nesting") {
    SUBCASE("frozen closed-form case") {
        const RealFn linear = [](double t) { return t; };
        const double margin = check_nesting(linear, 0.0, 0.1, 2.0, 1.0);
        CHECK(margin == doctest::Approx(kNestingMarginLinear).epsilon(1e-6));
        CHECK(margin >= 0.0);
    }

    SUBCASE("identity case p1 = p2") {
        const RealFn f = make_function(gaussian_spec(0.0, 1.0));
        CHECK(std::fabs(check_nesting(f, 0.3, 0.1, 2.0, 2.0)) < 1e-12);
    }

    SUBCASE("gaussian at several radii") {
        const RealFn f = make_function(gaussian_spec(0.0, 1.0));
        for (double r : {0.1, 0.01})
            CHECK(check_nesting(f, 0.3, r, 4.0, 2.0) >= -1e-9);
    }

    SUBCASE("random exponents over the catalog") {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> ux(-1.5, 1.5);
        std::uniform_real_distribution<double> ur(std::log(0.01), std::log(0.3));
        std::uniform_real_distribution<double> up(1.0, 8.0);
        for (const auto& spec :
             {gaussian_spec(0.0, 1.0), lorentzian_spec(0.2, 0.8), smooth_bump_spec(2.0),
              oscillatory_spec(0.0, 1.0, 0.5), sign_jump_spec(0.0), power_cusp_spec(0.0, 0.5),
              polynomial_spec({0.0, 1.0, -0.3})}) {
            const RealFn f = make_function(spec);
            for (int i = 0; i < 20; ++i) {
                const double x = ux(rng);
                const double r = std::exp(ur(rng));
                const double p1 = up(rng);
                std::uniform_real_distribution<double> up2(1.0, p1);
                const double p2 = up2(rng);
                CHECK(check_nesting(f, x, r, p1, p2) >= -1e-9);
            }
        }
    }

    SUBCASE("parameter validation") {
        const RealFn f = make_function(gaussian_spec(0.0, 1.0));
        CHECK_THROWS_AS(check_nesting(f, 0.0, 0.1, 2.0, 3.0), ParamError); // p2 > p1
        CHECK_THROWS_AS(check_nesting(f, 0.0, 0.1, 2.0, 0.5), ParamError); // p2 < 1
    }
}

TEST_CASE("check_product") {
    const RealFn one = [](double) { return 1.0; };
    const RealFn g = make_function(gaussian_spec(0.0, 1.0));

    SUBCASE("constant first factor: product oscillation equals theta(g)") {
        const ProductMargins m = check_product(one, g, 0.3, 0.05, 2.0, 2.0);
        CHECK(m.regime == ProductRegime::Conjugate);
        CHECK(m.theta_product == doctest::Approx(theta(g, 0.3, 0.05, 1.0)).epsilon(1e-12));
        CHECK(m.min_margin() >= -1e-12);
    }

    SUBCASE("conjugate regime margins") {
        const ProductMargins m = check_product(g, g, 0.3, 0.05, 2.0, 2.0);
        CHECK(m.regime == ProductRegime::Conjugate);
        CHECK(m.p3 == 1.0);
        CHECK(m.split_margin >= -1e-9);
        CHECK(m.i_margin >= -1e-9);
        CHECK(m.j_margin >= -1e-9);
    }

    SUBCASE("split regime with the 2^(p3-1) factor") {
        const RealFn b = make_function(smooth_bump_spec(2.0));
        double prev_theta = HUGE_VAL;
        for (double r : radius_ladder()) {
            const ProductMargins m = check_product(g, b, 0.3, r, 4.0, 4.0);
            CHECK(m.regime == ProductRegime::Split);
            CHECK(m.p3 == doctest::Approx(2.0).epsilon(1e-12));
            CHECK(m.min_margin() >= -1e-9);
            CHECK(m.theta_product < prev_theta + 1e-15);
            prev_theta = m.theta_product;
        }
        CHECK(prev_theta < 1e-3);
    }

    SUBCASE("the top-level split genuinely needs the convexity factor") {
        // with p3 = 2 the raw split I+J can sit below theta_p3(fg); check
        // that the unscaled margin would go negative somewhere while the
        // corrected one stays valid
        const RealFn f = make_function(gaussian_spec(0.0, 1.0));
        const RealFn h = make_function(gaussian_spec(0.3, 0.7));
        bool raw_violated = false;
        for (double x : {-0.4, -0.1, 0.2, 0.5})
            for (double r : {0.2, 0.1, 0.05}) {
                const ProductMargins m = check_product(f, h, x, r, 4.0, 4.0);
                CHECK(m.split_margin >= -1e-9);
                const double raw = (m.i_actual + m.j_actual) - m.theta_product;
                if (raw < -1e-12)
                    raw_violated = true;
            }
        CHECK(raw_violated);
    }

    SUBCASE("exponent regime validation") {
        CHECK_THROWS_AS(check_product(g, g, 0.0, 0.1, 1.5, 1.5), ParamError); // sum > 1
        CHECK_THROWS_AS(check_product(g, g, 0.0, 0.1, 0.5, 2.0), ParamError);
    }
}

TEST_CASE("rational exponent arithmetic") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(1, 6).plus(Rational(1, 6)).plus(Rational(1, 6)) == Rational(1, 2));
    CHECK(Rational(1, 2).reciprocal() == Rational(2, 1));
    CHECK_THROWS_AS(Rational(1, 0), ParamError);
    CHECK_THROWS_AS(Rational(0, 1).reciprocal(), ParamError);

    // chain bookkeeping ends at 1/sum(1/p_i) exactly, for random exponents
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long long> up(4, 12);
    for (int trial = 0; trial < 50; ++trial) {
        const long long a = up(rng), b = up(rng), c = up(rng);
        Rational inv = Rational(1, a).plus(Rational(1, b)).plus(Rational(1, c));
        const Rational direct(a * b * c, b * c + a * c + a * b);
        CHECK(inv.reciprocal() == direct);
    }
}

TEST_CASE("check_multi_product") {
    const RealFn g = make_function(gaussian_spec(0.0, 1.0));
    const std::vector<RealFn> three = {g, g, g};

    SUBCASE("n = 2 reduces to check_product") {
        const MultiProductReport rep = check_multi_product({g, g}, {2, 2}, 0.3, 0.05);
        const ProductMargins direct = check_product(g, g, 0.3, 0.05, 2.0, 2.0);
        REQUIRE(rep.steps.size() == 1);
        CHECK(rep.steps[0].theta_product == doctest::Approx(direct.theta_product).epsilon(1e-14));
        CHECK(rep.final_exponent == Rational(1, 1));
        CHECK(rep.theta_final == doctest::Approx(direct.theta_product).epsilon(1e-12));
    }

    SUBCASE("three factors below the critical line") {
        // sum 1/p = 1/2, final exponent 2
        double prev = HUGE_VAL;
        for (double r : radius_ladder()) {
            const MultiProductReport rep = check_multi_product(three, {6, 6, 6}, 0.3, r);
            CHECK(rep.final_exponent == Rational(2, 1));
            REQUIRE(rep.exponent_chain.size() == 2);
            CHECK(rep.exponent_chain[0] == Rational(3, 1));
            CHECK(rep.theta_final < prev + 1e-15);
            prev = rep.theta_final;
        }
        CHECK(prev < 1e-3);
    }

    SUBCASE("three factors at the critical line") {
        // sum 1/p = 1, final exponent 1
        double prev = HUGE_VAL;
        for (double r : radius_ladder()) {
            const MultiProductReport rep = check_multi_product(three, {3, 3, 3}, 0.3, r);
            CHECK(rep.final_exponent == Rational(1, 1));
            CHECK(rep.theta_final < prev + 1e-15);
            prev = rep.theta_final;
        }
        CHECK(prev < 1e-3);
    }

    SUBCASE("exponent sum above one is rejected") {
        CHECK_THROWS_AS(check_multi_product(three, {2, 2, 2}, 0.3, 0.1), ParamError);
        CHECK_THROWS_AS(check_multi_product({g}, {2}, 0.3, 0.1), ParamError);
    }
}

TEST_CASE("sup-norm surrogate") {
    const RealFn g = make_function(gaussian_spec(0.0, 1.0));
    const SupOscillationSurrogate ok = sup_oscillation_surrogate(g, 0.3, radius_ladder());
    CHECK(ok.satisfied);
    CHECK(ok.oscillation.back() < ok.oscillation.front());

    const RealFn jump = make_function(sign_jump_spec(0.0));
    const SupOscillationSurrogate bad = sup_oscillation_surrogate(jump, 0.0, radius_ladder());
    CHECK_FALSE(bad.satisfied);
}
