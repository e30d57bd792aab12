#pragma once

// Continuum comparison for families near the identity:
// G(x, mu) = x + mu (a + psi(x) + mu g(x)) is one Euler step of size mu for
// dX/dt = a + psi(X) + mu g(X), whose passage time through one period is
// T(mu) = int_0^1 dX / (a + psi(X) + mu g(X)).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "circlerot/errors.hpp"
#include "circlerot/family.hpp"
#include "circlerot/quadrature.hpp"

namespace circlerot {

enum class PassageMethod { quadrature, ode_integration };

struct PassageTime {
    double T_mu = 0.0;
    double mu = 0.0;
    PassageMethod method = PassageMethod::quadrature;
    double quadrature_error = 0.0;
};

namespace detail {

template <class V>
void require_positive_velocity(const V& velocity, int grid = 4096)
{
    for (int j = 0; j < grid; ++j) {
        const double x = static_cast<double>(j) / grid;
        if (!(velocity(x) > 0.0))
            throw EstimationError("vanishing velocity: field is not positive on [0,1]");
    }
}

}  // namespace detail

/// int_0^1 dx / velocity(x) for a positive period-one velocity field.
template <class V>
PassageTime passage_time_of(const V& velocity, double mu = 0.0, double tol = 1e-12)
{
    detail::require_positive_velocity(velocity);
    const QuadratureResult r = periodic_trapezoid([&](double x) { return 1.0 / velocity(x); }, tol);
    if (!r.converged)
        throw EstimationError("passage time quadrature did not converge");
    return {r.value, mu, PassageMethod::quadrature, r.error_estimate};
}

/// Passage time for a velocity that is smooth between the sorted break points
/// `breaks` (one period starting at breaks.front()); Romberg on every piece.
template <class V>
PassageTime passage_time_piecewise(std::span<const double> breaks, const V& velocity, double tol = 1e-13)
{
    if (breaks.empty())
        throw std::invalid_argument("passage_time_piecewise: need at least one break");
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i < breaks.size(); ++i) {
        const double lo = breaks[i];
        const double hi = i + 1 < breaks.size() ? breaks[i + 1] : breaks.front() + 1.0;
        // evaluate strictly inside the piece so the right formula is used at the ends
        const double mid = 0.5 * (lo + hi);
        for (double x : {lo, mid})
            if (!(velocity(x, mid) > 0.0))
                throw EstimationError("vanishing velocity on a piece");
        const QuadratureResult r = romberg([&](double x) { return 1.0 / velocity(x, mid); }, lo, hi, tol);
        total += r.value;
        err += r.error_estimate;
    }
    return {total, 0.0, PassageMethod::quadrature, err};
}

/// T(mu) for a family rigid at an integer rotation (q = 1).
PassageTime passage_time(const SmoothFamily& family, double mu);
/// Passage time of the first-order field of F^q - p (equals T0/q).
PassageTime passage_time(const QExpansion& expansion);

struct EulerFlowComparison {
    double max_deviation = 0.0;
    std::int64_t steps = 0;
    double flow_time = 0.0;
};

/// max_j |X(j mu) - x_j| over j <= n, where x_j is the orbit of x0 under
/// F - p and X the flow from x0, integrated with an adaptive Dormand-Prince
/// 5(4) pair at tolerance 1e-12.  Default n covers one passage; any n must
/// satisfy n |mu| <= T(mu) + 2 |mu|.
EulerFlowComparison euler_orbit_vs_flow(const SmoothFamily& family, double mu,
                                        std::optional<std::int64_t> n = std::nullopt, double x0 = 0.0);

}  // namespace circlerot
