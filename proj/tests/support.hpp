#pragma once

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "circlerot/family.hpp"
#include "circlerot/pwl.hpp"
#include "circlerot/spectral.hpp"

namespace testsupport {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int integer(Rng& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Random trigonometric polynomial with harmonics 1..max_m, each present with
/// probability 1/2 (at least one), coefficients in [-amp, amp].
inline circlerot::HarmonicProfile random_profile(Rng& rng, int max_m, double amp)
{
    std::vector<circlerot::Harmonic> terms;
    while (terms.empty())
        for (int m = 1; m <= max_m; ++m)
            if (integer(rng, 0, 1))
                terms.push_back({m, uniform(rng, -amp, amp), uniform(rng, -amp, amp)});
    return circlerot::HarmonicProfile(terms);
}

inline circlerot::Rational random_rest(Rng& rng, int max_q)
{
    const int q = integer(rng, 1, max_q);
    int p = integer(rng, 0, q - 1);
    while (std::gcd(p, q) != 1)
        p = integer(rng, 0, q - 1);
    return {p, q};
}

/// Family rigid at a random p/q whose drift clears min(Psi) by [0.2, 1].
inline circlerot::SmoothFamily random_transversal(Rng& rng, int max_q = 4, int max_m = 8,
                                                  circlerot::SecondOrderTerm g = {})
{
    const circlerot::Rational rest = random_rest(rng, max_q);
    circlerot::HarmonicProfile psi = random_profile(rng, max_m, 0.5);
    const circlerot::HarmonicProfile Psi = circlerot::resonant(psi, static_cast<int>(rest.q)).terms;
    const double a = -circlerot::extrema(0.0, Psi).min + uniform(rng, 0.2, 1.0);
    return circlerot::SmoothFamily::generic(rest, a, std::move(psi), std::move(g));
}

/// Two-piece homeomorphism lift h with h(0) = 0, h(c) = d.
struct TwoPieceLift {
    double c, d;

    double operator()(double x) const
    {
        const double n = std::floor(x), y = x - n;
        return n + (y < c ? y * d / c : d + (y - c) * (1.0 - d) / (1.0 - c));
    }
    double inverse(double v) const
    {
        const double n = std::floor(v), y = v - n;
        return n + (y < d ? y * c / d : c + (y - d) * (1.0 - c) / (1.0 - d));
    }
};

struct RandomPWL {
    circlerot::PWLFamily family;
    circlerot::Rational rest;
};

inline double circular_distance(double x, double y)
{
    const double d = std::abs(x - y) - std::floor(std::abs(x - y));
    return std::min(d, 1.0 - d);
}

inline bool gaps_open(const std::vector<double>& breaks, const std::vector<double>& values, double gap)
{
    for (std::size_t k = 0; k < breaks.size(); ++k) {
        const double nb = k + 1 < breaks.size() ? breaks[k + 1] : breaks[0] + 1.0;
        const double na = k + 1 < values.size() ? values[k + 1] : values[0] + 1.0;
        if (!(nb - breaks[k] > gap && na - values[k] > gap))
            return false;
    }
    return breaks.front() >= 0.0 && breaks.front() < 1.0;
}

/// F(x, mu) = x + p/q + mu phi(x) with phi piecewise linear and positive, breaks
/// moving slowly.  For q > 1 the break orbits are kept apart.
inline std::optional<RandomPWL> random_perturbed_translation(Rng& rng, int max_pieces, circlerot::Rational rest)
{
    const int n = integer(rng, 1, max_pieces);
    std::vector<double> breaks;
    for (int k = 0; k < n; ++k)
        breaks.push_back(uniform(rng, 0.0, 1.0));
    std::sort(breaks.begin(), breaks.end());
    for (double b : breaks)
        for (double c : breaks)
            for (std::int64_t r = 1; r < rest.q; ++r)
                if (circular_distance(b + static_cast<double>(r) * rest.value(), c) < 0.02)
                    return std::nullopt;
    std::vector<double> values;
    for (double b : breaks)
        values.push_back(b + rest.value());
    if (!gaps_open(breaks, values, 0.02))
        return std::nullopt;
    std::vector<circlerot::BreakPath> bp;
    std::vector<circlerot::ValuePath> vp;
    for (std::size_t k = 0; k < breaks.size(); ++k) {
        bp.push_back({breaks[k], uniform(rng, -0.05, 0.05)});
        vp.push_back({values[k], uniform(rng, 0.5, 2.0)});
    }
    return RandomPWL{circlerot::PWLFamily(std::move(bp), std::move(vp)), rest};
}

/// Random PWL family with F^q(., 0) = x + p and positive first-order field.
/// A kinked F(., 0) with F^q(., 0) = x + p either has break orbits that split
/// for mu != 0 or keeps a periodic orbit of breaks, so only perturbed
/// translations are drawn.
inline RandomPWL random_rigid_pwl(Rng& rng, int max_pieces, int max_q)
{
    while (true) {
        const circlerot::Rational rest = random_rest(rng, max_q);
        std::optional<RandomPWL> r = random_perturbed_translation(rng, max_pieces, rest);
        if (r && circlerot::validate(r->family).homeomorphic())
            return *r;
    }
}

}  // namespace testsupport
