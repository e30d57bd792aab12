#include <doctest.h>

#include <cmath>

#include "circlerot/errors.hpp"
#include "circlerot/experiments.hpp"
#include "circlerot/oracle.hpp"
#include "circlerot/predict.hpp"
#include "circlerot/rotation.hpp"
#include "support.hpp"

using namespace circlerot;
using testsupport::Rng;

TEST_CASE("passage_time examples")
{
    const SmoothFamily unit = SmoothFamily::generic({0, 1}, 1.0, {});
    for (double mu : {0.0, 0.01, -0.3})
        CHECK(passage_time(unit, mu).T_mu == doctest::Approx(1.0).epsilon(1e-14));

    const SmoothFamily arn = SmoothFamily::generic({0, 1}, 5.0, HarmonicProfile::sine(1, 4.0));
    const PassageTime t = passage_time(arn, 0.0);
    CHECK(t.T_mu == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(t.method == PassageMethod::quadrature);

    const double u = 0.4;
    const SmoothFamily sq = table_family({0, 1}, 1.0 + 0.5 * u * u, 2.0 * u, -0.5 * u * u);
    CHECK(passage_time(sq, 0.0).T_mu == doctest::Approx(std::pow(0.84, -1.5)).epsilon(1e-12));
}

TEST_CASE("passage_time rejects vanishing velocity and non-integer rotations")
{
    const SmoothFamily locked = SmoothFamily::generic({0, 1}, 0.5, HarmonicProfile::sine(1, 1.0));
    CHECK_THROWS_WITH_AS(passage_time(locked, 0.0), doctest::Contains("vanishing velocity"), EstimationError);
    CHECK_THROWS_AS(passage_time(SmoothFamily::generic({1, 2}, 1.0, {}), 0.0), FamilyError);
}

TEST_CASE("passage time of the q-expansion is T0 / q")
{
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const SmoothFamily f = testsupport::random_transversal(rng);
        const SlopeReport r = classify_and_predict(f);
        const PassageTime t = passage_time(q_expand(f));
        CHECK(std::abs(t.T_mu * static_cast<double>(f.rest()->q) - *r.T0) <= 1e-10);
    }
}

TEST_CASE("piecewise passage time")
{
    const std::vector<double> breaks{0.0, 0.5};
    const auto v = [](double x, double mid) { return mid < 0.5 ? 1.0 + 2.0 * x : 2.0 - 2.0 * (x - 0.5); };
    const PassageTime t = passage_time_piecewise(breaks, v);
    CHECK(t.T_mu == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    const auto bad = [](double x, double) { return x - 0.25; };
    CHECK_THROWS_AS(passage_time_piecewise(breaks, bad), EstimationError);
}

TEST_CASE("T(mu) approaches T0 linearly with the predicted rate")
{
    const HarmonicProfile g = HarmonicProfile::cosine(1, 1.0) + HarmonicProfile::sine(3, 0.5);
    const SmoothFamily f = SmoothFamily::generic({0, 1}, 2.0, HarmonicProfile::sine(1, 1.2), {0.4, g});
    const double T0 = passage_time(f, 0.0).T_mu;
    // dT/dmu at 0 = -int g / (a + psi)^2
    const double rate = -periodic_trapezoid([&](double x) {
                             const double v = 2.0 + f.psi()(x);
                             return f.second_order()(x) / (v * v);
                         }).value;
    std::vector<double> mus, gaps;
    for (double mu : {1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 1e-4}) {
        const double d = passage_time(f, mu).T_mu - T0;
        CHECK(std::abs(d / mu - rate) <= 10.0 * mu);
        mus.push_back(mu);
        gaps.push_back(std::abs(d));
    }
    const ProportionalFit fit = fit_proportional(mus, gaps);
    for (std::size_t i = 0; i < mus.size(); ++i)
        CHECK(gaps[i] <= 1.1 * fit.coefficient * mus[i]);
}

TEST_CASE("euler_orbit_vs_flow examples")
{
    const SmoothFamily flat = SmoothFamily::generic({0, 1}, 1.5, {});
    CHECK(euler_orbit_vs_flow(flat, 1e-2).max_deviation <= 1e-11);

    const SmoothFamily arn = SmoothFamily::generic({0, 1}, 5.0, HarmonicProfile::sine(1, 4.0));
    std::vector<double> logs_mu, logs_dev;
    for (double mu : {1e-2, 5e-3, 2.5e-3}) {
        const EulerFlowComparison c = euler_orbit_vs_flow(arn, mu);
        CHECK(c.steps == static_cast<std::int64_t>(std::ceil((1.0 / 3.0) / mu)));
        logs_mu.push_back(std::log(mu));
        logs_dev.push_back(std::log(c.max_deviation));
    }
    const SlopeFit order = fit_slope(logs_mu, logs_dev);
    CHECK(std::abs(order.slope - 1.0) <= 0.15);

    const SmoothFamily with_g = SmoothFamily::generic({0, 1}, 3.0, HarmonicProfile::sine(2, 1.0),
                                                      {0.5, HarmonicProfile::cosine(1, 2.0)});
    double previous = 1e300;
    for (double mu : {1e-2, 1e-3, 1e-4}) {
        const double d = euler_orbit_vs_flow(with_g, mu).max_deviation;
        CHECK(d < previous);
        previous = d;
    }
    CHECK(previous <= 1e-3);

    const SmoothFamily neg = SmoothFamily::generic({0, 1}, 5.0, HarmonicProfile::sine(1, 4.0));
    CHECK(euler_orbit_vs_flow(neg, -5e-3).max_deviation <= 2.0 * euler_orbit_vs_flow(neg, 5e-3).max_deviation);
}

TEST_CASE("euler_orbit_vs_flow argument checks")
{
    const SmoothFamily arn = SmoothFamily::generic({0, 1}, 5.0, HarmonicProfile::sine(1, 4.0));
    CHECK_THROWS(euler_orbit_vs_flow(arn, 0.0));
    CHECK_THROWS(euler_orbit_vs_flow(arn, 1e-2, 100));
    CHECK_NOTHROW(euler_orbit_vs_flow(arn, 1e-2, 30));
}

TEST_CASE("crossing rotation number of the Euler map scales like mu / T0")
{
    const SmoothFamily arn = SmoothFamily::generic({0, 1}, 5.0, HarmonicProfile::sine(1, 4.0));
    CrossingOptions options;
    options.windings = 50;
    for (double mu : {1e-2, 1e-3, 1e-4}) {
        const RotationEstimate r = crossing(arn.at(mu), options);
        CHECK(std::abs(r.value - 3.0 * mu) <= r.error_bound + 10.0 * mu * mu);
    }
}
