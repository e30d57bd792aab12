#include "circlerot/oracle.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>

namespace circlerot {

namespace {

Rational require_integer_rest(const SmoothFamily& family)
{
    const Rational rest = family.require_rest();
    if (rest.q != 1)
        throw FamilyError("passage time needs a family rigid at an integer rotation (q = 1)");
    return rest;
}

}  // namespace

PassageTime passage_time(const SmoothFamily& family, double mu)
{
    require_integer_rest(family);
    const double a = family.drift();
    const HarmonicProfile& psi = family.psi();
    const SecondOrderTerm& g = family.second_order();
    return passage_time_of([&](double x) { return a + psi(x) + mu * g(x); }, mu);
}

PassageTime passage_time(const QExpansion& expansion)
{
    return passage_time_of([&](double x) { return expansion.first_order(x); }, 0.0);
}

EulerFlowComparison euler_orbit_vs_flow(const SmoothFamily& family, double mu, std::optional<std::int64_t> n,
                                        double x0)
{
    namespace ode = boost::numeric::odeint;
    const Rational rest = require_integer_rest(family);
    if (mu == 0.0)
        throw std::invalid_argument("euler_orbit_vs_flow: mu must be nonzero");

    const double a = family.drift();
    const HarmonicProfile& psi = family.psi();
    const SecondOrderTerm& g = family.second_order();
    const double T = passage_time(family, mu).T_mu;
    const double h = std::abs(mu);

    const std::int64_t steps = n.value_or(static_cast<std::int64_t>(std::ceil(T / h)));
    if (steps < 1)
        throw std::invalid_argument("euler_orbit_vs_flow: need n >= 1");
    if (static_cast<double>(steps) * h > T + 2.0 * h)
        throw std::invalid_argument("euler_orbit_vs_flow: n |mu| exceeds one passage time");

    // For mu < 0 run the reversed field forward in s = -t.
    const double direction = mu > 0.0 ? 1.0 : -1.0;
    using State = std::array<double, 1>;
    auto field = [&](const State& X, State& dXdt, double) {
        dXdt[0] = direction * (a + psi(X[0]) + mu * g(X[0]));
    };

    std::vector<double> times(static_cast<std::size_t>(steps) + 1);
    for (std::size_t j = 0; j < times.size(); ++j)
        times[j] = static_cast<double>(j) * h;
    std::vector<double> flow;
    flow.reserve(times.size());
    State X{x0};
    try {
        auto stepper = ode::make_dense_output(1e-12, 1e-12, ode::runge_kutta_dopri5<State>());
        ode::integrate_times(stepper, field, X, times.begin(), times.end(), h / 4.0,
                             [&](const State& s, double) { flow.push_back(s[0]); });
    } catch (const std::exception& e) {
        throw EstimationError(std::string("flow integration failed: ") + e.what());
    }
    if (flow.size() != times.size())
        throw EstimationError("flow integration returned an incomplete trajectory");

    const FixedLift lift = family.at(mu);
    EulerFlowComparison out{0.0, steps, static_cast<double>(steps) * h};
    double x = x0;
    for (std::size_t j = 0; j < flow.size(); ++j) {
        out.max_deviation = std::max(out.max_deviation, std::abs(flow[j] - x));
        x = lift(x) - static_cast<double>(rest.p);
    }
    return out;
}

}  // namespace circlerot
