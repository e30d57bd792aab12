#pragma once

// Rotation-number estimators with explicit error bounds.
//
// Lifts are any callables double -> double.  Lifts that also expose
// reduced()/integer_shift() (FixedLift, PWL lifts) are iterated on the
// fractional part with the integer translation added back at the end, and
// lifts exposing is_rigid()/translation() short-circuit to the exact value.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <string>

#include "circlerot/errors.hpp"

namespace circlerot {

template <class L>
concept CircleLift = requires(const L& f, double x) {
    { f(x) } -> std::convertible_to<double>;
};

inline constexpr std::uint64_t kDefaultIterations = 100000;

enum class RotationMethod { birkhoff, crossing };

struct RotationEstimate {
    double value = 0.0;
    /// Rigorous half-width around value (up to floating-point rounding).
    double error_bound = 0.0;
    std::uint64_t iterations = 0;
    RotationMethod method = RotationMethod::birkhoff;

    double lower() const { return value - error_bound; }
    double upper() const { return value + error_bound; }
};

namespace detail {

template <class L>
concept SplitLift = CircleLift<L> && requires(const L& f, double x) {
    { f.reduced(x) } -> std::convertible_to<double>;
    { f.integer_shift() } -> std::convertible_to<std::int64_t>;
};

template <class L>
concept RigidAware = requires(const L& f) {
    { f.is_rigid() } -> std::convertible_to<bool>;
    { f.translation() } -> std::convertible_to<double>;
};

template <CircleLift L>
double reduced_step(const L& f, double x)
{
    if constexpr (SplitLift<L>)
        return f.reduced(x);
    else
        return f(x);
}

template <CircleLift L>
std::int64_t integer_part(const L& f)
{
    if constexpr (SplitLift<L>)
        return f.integer_shift();
    else
        return 0;
}


/// Fractional-part Birkhoff sum: returns (F^n(x0) - x0 - n*shift)/n.
template <CircleLift L>
double birkhoff_fraction(const L& lift, double x0, std::uint64_t n)
{
    double x = x0;
    double windings = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double y = reduced_step(lift, x);
        const double k = std::floor(y);
        windings += k;
        x = y - k;
    }
    return (windings + (x - x0)) / static_cast<double>(n);
}

/// Fractional parts are rounded to multiples of this quantum so that adding
/// an integer shift (|shift| < 2^11) to them is exact.
inline constexpr double kFractionQuantum = 0x1p-40;

inline double quantize(double fraction)
{
    return std::nearbyint(fraction / kFractionQuantum) * kFractionQuantum;
}

}  // namespace detail

/// (F^n(x0) - x0)/n with the classical bound |F^n(x) - x - n rho| < 1, widened
/// by the rounding quantum of the fractional part.
template <CircleLift L>
RotationEstimate birkhoff(const L& lift, double x0 = 0.0, std::uint64_t n = kDefaultIterations)
{
    if (n == 0)
        throw std::invalid_argument("birkhoff: iteration count must be >= 1");
    RotationEstimate est{0.0, 1.0 / static_cast<double>(n) + detail::kFractionQuantum, n,
                         RotationMethod::birkhoff};
    if constexpr (detail::RigidAware<L>) {
        if (lift.is_rigid()) {
            est.value = lift.translation();
            return est;
        }
    }
    est.value = static_cast<double>(detail::integer_part(lift)) +
                detail::quantize(detail::birkhoff_fraction(lift, x0, n));
    return est;
}

struct CrossingOptions {
    /// Number K of unit windings to pass; K = 1 is the single-crossing bracket.
    std::uint64_t windings = 1;
    /// Minimum |F(x) - x| on the grid; smaller signals a near-fixed point.
    double progress_floor = 1e-14;
    int grid = 4096;
    std::uint64_t iteration_cap = 1000000000;
};

/// Bracket from the first passage of the orbit of 0 through +-K:
/// F^n(0) <= K <= F^{n+1}(0) gives K/(n+1) <= rho <= K/n, and the mirror
/// statement for retreating lifts.  Requires F(x) - x of one strict sign.
///
/// When the very first step already passes K (n = 0) only the lower bound
/// exists; value is K and error_bound is infinite.
template <CircleLift L>
RotationEstimate crossing(const L& lift, const CrossingOptions& options = {})
{
    if (options.windings == 0)
        throw std::invalid_argument("crossing: windings must be >= 1");
    double lowest = std::numeric_limits<double>::infinity();
    double highest = -lowest;
    for (int j = 0; j < options.grid; ++j) {
        const double x = static_cast<double>(j) / options.grid;
        const double d = static_cast<double>(lift(x)) - x;
        lowest = std::min(lowest, d);
        highest = std::max(highest, d);
    }
    int direction = 0;
    if (lowest >= options.progress_floor)
        direction = 1;
    else if (highest <= -options.progress_floor)
        direction = -1;
    else
        throw EstimationError("no forward progress: min |F(x)-x| below floor (near mode locking)");

    // Track F^n(0) as windings + fractional part so that large K stays exact.
    const double target = static_cast<double>(options.windings);
    const double shift = static_cast<double>(detail::integer_part(lift));
    double whole = 0.0;
    double frac = 0.0;
    std::uint64_t n = 0;
    auto position = [&] { return whole + frac; };
    while (true) {
        if (n >= options.iteration_cap)
            throw EstimationError("crossing: iteration cap exceeded");
        const double y = detail::reduced_step(lift, frac);
        const double k = std::floor(y);
        whole += k + shift;
        frac = y - k;
        const double pos = position();
        if ((direction > 0 && pos >= target) || (direction < 0 && pos <= -target))
            break;
        ++n;
    }
    RotationEstimate est{0.0, 0.0, n + 1, RotationMethod::crossing};
    const double signed_target = direction * target;
    if (n == 0) {
        est.value = signed_target;
        est.error_bound = std::numeric_limits<double>::infinity();
        return est;
    }
    const double inner = signed_target / static_cast<double>(n + 1);
    const double outer = signed_target / static_cast<double>(n);
    est.value = 0.5 * (inner + outer);
    est.error_bound = 0.5 * std::abs(outer - inner);
    return est;
}

/// The lift F^q built from F.
template <CircleLift L>
class PowerLift {
public:
    PowerLift(const L& base, std::int64_t q) : base_(base), q_(q)
    {
        if (q < 1)
            throw std::invalid_argument("power: q must be >= 1");
    }

    double operator()(double x) const
    {
        for (std::int64_t i = 0; i < q_; ++i)
            x = base_(x);
        return x;
    }

    double reduced(double x) const
        requires detail::SplitLift<L>
    {
        for (std::int64_t i = 0; i < q_; ++i)
            x = base_.reduced(x);
        return x;
    }

    std::int64_t integer_shift() const
        requires detail::SplitLift<L>
    {
        return q_ * base_.integer_shift();
    }

private:
    const L& base_;
    std::int64_t q_;
};

/// F^q - p, the reduced q-th iterate near a rational rotation p/q.
template <CircleLift L>
class ReducedPowerLift {
public:
    ReducedPowerLift(const L& base, std::int64_t p, std::int64_t q) : power_(base, q), p_(p) {}

    double operator()(double x) const { return power_(x) - static_cast<double>(p_); }

    double reduced(double x) const
        requires detail::SplitLift<L>
    {
        return power_.reduced(x);
    }

    std::int64_t integer_shift() const
        requires detail::SplitLift<L>
    {
        return power_.integer_shift() - p_;
    }

private:
    PowerLift<L> power_;
    std::int64_t p_;
};

/// rho(F) = rho(F^q)/q with rho(F^q) estimated by Birkhoff over n iterates of F^q.
template <CircleLift L>
RotationEstimate rho_of_power(const L& lift, std::int64_t q, double x0 = 0.0,
                              std::uint64_t n = kDefaultIterations)
{
    if (n == 0)
        throw std::invalid_argument("rho_of_power: iteration count must be >= 1");
    const PowerLift<L> power(lift, q);
    const double qd = static_cast<double>(q);
    RotationEstimate est{0.0, 1.0 / (static_cast<double>(n) * qd) + detail::kFractionQuantum,
                         n * static_cast<std::uint64_t>(q),
                         RotationMethod::birkhoff};
    if constexpr (detail::RigidAware<L>) {
        if (lift.is_rigid()) {
            est.value = lift.translation();
            return est;
        }
    }
    // rho(F^q) = q*shift + fraction, so rho(F) = shift + fraction/q.
    est.value = static_cast<double>(detail::integer_part(lift)) +
                detail::quantize(detail::birkhoff_fraction(power, x0, n) / qd);
    return est;
}

}  // namespace circlerot
