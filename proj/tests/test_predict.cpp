#include <doctest.h>

#include <cmath>

#include "circlerot/errors.hpp"
#include "circlerot/experiments.hpp"
#include "circlerot/predict.hpp"
#include "support.hpp"

using namespace circlerot;
using testsupport::Rng;

namespace {

SmoothFamily u_family(double u)
{
    return table_family({0, 1}, 1.0 + 0.5 * u * u, 2.0 * u, -0.5 * u * u);
}

}  // namespace

TEST_CASE("classify_and_predict examples")
{
    const SlopeReport r1 = classify_and_predict(SmoothFamily::generic({0, 1}, 5.0, HarmonicProfile::sine(1, 4.0)));
    CHECK(r1.classification == Transversality::transversal);
    REQUIRE(r1.T0);
    CHECK(*r1.T0 == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(r1.slope == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(r1.min_a_psi == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r1.max_a_psi == doctest::Approx(9.0).epsilon(1e-12));
    CHECK_FALSE(r1.reflected);

    const HarmonicProfile psi = HarmonicProfile::sine(1, 1.0) + HarmonicProfile::cosine(2, 3.0);
    const SlopeReport r2 = classify_and_predict(SmoothFamily::generic({1, 2}, 5.0, psi));
    CHECK(r2.classification == Transversality::transversal);
    CHECK(r2.slope == doctest::Approx(4.0).epsilon(1e-13));
    REQUIRE(r2.resonant_profile.terms.terms().size() == 1);
    CHECK(r2.resonant_profile.terms.terms()[0].m == 2);

    const SlopeReport locked = classify_and_predict(SmoothFamily::generic({0, 1}, 0.5, HarmonicProfile::sine(1, 1.0)));
    CHECK(locked.classification == Transversality::mode_locked);
    CHECK(locked.slope == 0.0);
    CHECK_FALSE(locked.T0);

    const SlopeReport flat = classify_and_predict(SmoothFamily::generic({2, 3}, 2.0, HarmonicProfile::sine(1, 1.0)));
    CHECK(flat.classification == Transversality::transversal);
    CHECK(flat.resonant_profile.empty());
    CHECK(flat.slope == 2.0);
}

TEST_CASE("tangential families are indeterminate")
{
    const SmoothFamily tangent = SmoothFamily::generic({0, 1}, 1.0, HarmonicProfile::sine(1, 1.0));
    const SlopeReport r = classify_and_predict(tangent);
    CHECK(r.classification == Transversality::indeterminate);
    CHECK(std::abs(r.min_a_psi) <= 1e-9);
    CHECK_FALSE(r.T0);
    CHECK_THROWS_WITH_AS(require_verdict(tangent), doctest::Contains("indeterminate transversality"), EstimationError);
    CHECK(std::string(to_string(r.classification)) == "indeterminate");
}

TEST_CASE("negative drift reports the reflected slope")
{
    const SlopeReport r = classify_and_predict(SmoothFamily::generic({0, 1}, -5.0, HarmonicProfile::sine(1, 4.0)));
    CHECK(r.classification == Transversality::transversal);
    CHECK(r.reflected);
    CHECK(r.slope == doctest::Approx(-3.0).epsilon(1e-13));
    // rho(mu) for a < 0 equals -rho(-mu) of the a > 0 family
    const SmoothFamily neg = SmoothFamily::generic({0, 1}, -5.0, HarmonicProfile::sine(1, 4.0));
    const RotationEstimate e = crossing(neg.at(1e-3));
    CHECK(std::abs(e.value / 1e-3 - r.slope) <= 0.02);
}

TEST_CASE("brunovsky_slope examples")
{
    CHECK(brunovsky_slope(SmoothFamily::generic({1, 3}, 2.0, HarmonicProfile::sine(1, 0.3))) == 2.0);
    CHECK(brunovsky_slope(SmoothFamily::generic({0, 1}, 0.0, {})) == 0.0);
    const SmoothFamily arn = SmoothFamily::generic({0, 1}, 5.0, HarmonicProfile::sine(1, 4.0));
    CHECK(brunovsky_slope(arn) == 5.0);
    CHECK(classify_and_predict(arn).slope != doctest::Approx(5.0));
}

TEST_CASE("parkhe_slope examples")
{
    CHECK(parkhe_slope(SmoothFamily::generic({0, 1}, 5.0, HarmonicProfile::sine(1, 4.0))) ==
          doctest::Approx(3.0).epsilon(1e-10));
    CHECK(parkhe_slope(SmoothFamily::generic({2, 5}, 1.7, {})) == doctest::Approx(1.7).epsilon(1e-13));
    CHECK(parkhe_slope(u_family(0.2)) == doctest::Approx(std::pow(0.96, 1.5)).epsilon(1e-10));
    CHECK(std::abs(parkhe_slope(u_family(0.2)) - 0.941) < 5e-4);
    CHECK_THROWS_WITH_AS(parkhe_slope(SmoothFamily::generic({0, 1}, 0.5, HarmonicProfile::sine(1, 1.0))),
                         doctest::Contains("non-positive sensitivity"), EstimationError);
}

TEST_CASE("closed_form examples and domains")
{
    CHECK(closed_form(closed_forms::ArnoldQ1{5.0, 4.0}) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(closed_form(closed_forms::ModifiedQ2{5.0, 0.5}) == doctest::Approx(std::sqrt(24.75)).epsilon(1e-15));
    CHECK(std::abs(closed_form(closed_forms::ModifiedQ2{5.0, 0.5}) - 4.975) < 5e-4);
    CHECK(std::abs(closed_form(closed_forms::ModifiedU{0.4}) - 0.770) < 5e-4);
    CHECK(closed_form(closed_forms::ModifiedU{-0.4}) == closed_form(closed_forms::ModifiedU{0.4}));
    CHECK_THROWS_AS(closed_form(closed_forms::ArnoldQ1{1.0, 2.0}), std::domain_error);
    CHECK_THROWS_AS(closed_form(closed_forms::ModifiedQ2{1.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(closed_form(closed_forms::ModifiedU{0.5}), std::domain_error);
}

TEST_CASE("property: quadrature slope matches the closed forms on the table configurations")
{
    struct Row {
        Rational rest;
        double a, b, c;
        double expected;
    };
    const std::vector<Row> rows{
        {{0, 1}, 5, 4, 0, 3.0},
        {{0, 1}, 5, 1, 0, std::sqrt(24.0)},
        {{1, 2}, 5, 4, 0.5, std::sqrt(24.75)},
        {{1, 2}, 5, -1, 0.5, std::sqrt(24.75)},
        {{1, 2}, 5, 1, 3, 4.0},
    };
    for (const Row& r : rows)
        CHECK(std::abs(classify_and_predict(table_family(r.rest, r.a, r.b, r.c)).slope - r.expected) <= 1e-10);
    for (double u : {0.2, -0.2, 0.4, -0.4})
        CHECK(std::abs(classify_and_predict(u_family(u)).slope - closed_form(closed_forms::ModifiedU{u})) <= 1e-10);
}

TEST_CASE("property: slope is even in u")
{
    for (double u : {0.05, 0.2, 0.33, 0.4, 0.49}) {
        const double plus = classify_and_predict(u_family(u)).slope;
        const double minus = classify_and_predict(u_family(-u)).slope;
        CHECK(std::abs(plus - minus) <= 1e-14);
    }
}

TEST_CASE("property: the (1,2) slope does not depend on b")
{
    const double reference = classify_and_predict(table_family({1, 2}, 5.0, 0.0, 0.5)).slope;
    for (double b : {-1.0, 1.0, 4.0}) {
        CHECK(classify_and_predict(table_family({1, 2}, 5.0, b, 0.5)).slope == reference);
        CHECK(std::abs(parkhe_slope(table_family({1, 2}, 5.0, b, 0.5)) - reference) <= 1e-10);
    }
}

TEST_CASE("property: empty resonant spectrum reduces to the drift exactly")
{
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const int q = testsupport::integer(rng, 2, 6);
        std::vector<Harmonic> terms;
        for (int m = 1; m <= 10; ++m)
            if (m % q != 0)
                terms.push_back({m, testsupport::uniform(rng, -0.3, 0.3), testsupport::uniform(rng, -0.3, 0.3)});
        const Rational rest = {1, q};
        const double a = testsupport::uniform(rng, 0.1, 3.0);
        const SmoothFamily f = SmoothFamily::generic(rest, a, HarmonicProfile(terms));
        const SlopeReport r = classify_and_predict(f);
        CHECK(r.resonant_profile.empty());
        CHECK(r.slope == brunovsky_slope(f));
    }
}

TEST_CASE("property: Fourier and sensitivity routes agree on random transversal families")
{
    Rng rng(32);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const SmoothFamily f = testsupport::random_transversal(rng);
        const SlopeReport r = classify_and_predict(f);
        REQUIRE(r.classification == Transversality::transversal);
        worst = std::max(worst, std::abs(r.slope - parkhe_slope(f)));
    }
    CHECK(worst <= 1e-8);
}
