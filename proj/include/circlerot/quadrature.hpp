#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace circlerot {

struct QuadratureResult {
    double value = 0.0;
    /// |difference| between the last two refinement levels.
    double error_estimate = 0.0;
    std::size_t points = 0;
    bool converged = false;
};

/// Trapezoid rule for a period-one integrand over [0, 1), doubling the
/// node count (reusing previous nodes) until successive levels agree to
/// tol*max(1, |value|).  Converges geometrically for analytic periodic
/// integrands.
template <class F>
QuadratureResult periodic_trapezoid(const F& f, double tol = 1e-12, std::size_t start = 64,
                                    std::size_t cap = std::size_t{1} << 20)
{
    if (start < 2 || cap < start)
        throw std::invalid_argument("periodic_trapezoid: bad node counts");
    std::size_t n = start;
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        sum += f(static_cast<double>(j) / static_cast<double>(n));
    QuadratureResult result{sum / static_cast<double>(n), 0.0, n, false};
    while (2 * n <= cap) {
        // new nodes are the odd multiples of 1/(2n)
        double fresh = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            fresh += f((2.0 * static_cast<double>(j) + 1.0) / (2.0 * static_cast<double>(n)));
        sum += fresh;
        n *= 2;
        const double next = sum / static_cast<double>(n);
        result.error_estimate = std::abs(next - result.value);
        result.value = next;
        result.points = n;
        if (result.error_estimate <= tol * std::max(1.0, std::abs(next))) {
            result.converged = true;
            break;
        }
    }
    return result;
}

/// Romberg integration of a smooth integrand on [a, b].
template <class F>
QuadratureResult romberg(const F& f, double a, double b, double tol = 1e-13, int max_levels = 24)
{
    if (!(b > a))
        throw std::invalid_argument("romberg: need a < b");
    std::vector<double> prev, row;
    double h = b - a;
    double trap = 0.5 * h * (f(a) + f(b));
    prev.push_back(trap);
    std::size_t intervals = 1;
    QuadratureResult result{trap, 0.0, 2, false};
    for (int level = 1; level < max_levels; ++level) {
        double mids = 0.0;
        for (std::size_t j = 0; j < intervals; ++j)
            mids += f(a + (static_cast<double>(j) + 0.5) * h);
        trap = 0.5 * trap + 0.5 * h * mids;
        h *= 0.5;
        intervals *= 2;
        row.assign(1, trap);
        double factor = 1.0;
        for (std::size_t k = 1; k <= prev.size(); ++k) {
            factor *= 4.0;
            row.push_back(row[k - 1] + (row[k - 1] - prev[k - 1]) / (factor - 1.0));
        }
        result.error_estimate = std::abs(row.back() - prev.back());
        result.value = row.back();
        result.points = intervals + 1;
        if (level >= 3 && result.error_estimate <= tol * std::max(1.0, std::abs(result.value))) {
            result.converged = true;
            break;
        }
        prev.swap(row);
    }
    return result;
}

}  // namespace circlerot
