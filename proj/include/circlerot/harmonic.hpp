#pragma once

// Finite trigonometric polynomials with zero mean, the x-dependent part of
// every smooth lift in the library.

#include <utility>
#include <vector>

namespace circlerot {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// One term cos_coeff*cos(2*pi*m*x) + sin_coeff*sin(2*pi*m*x).
struct Harmonic {
    int m = 1;
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;
};

/// Zero-mean trigonometric polynomial of period one.
///
/// Terms are kept sorted by strictly increasing harmonic index m >= 1; the
/// constructor rejects anything else. Evaluation reduces x modulo one and
/// walks the powers of exp(2*pi*i*x), so the cost is linear in the highest
/// harmonic regardless of how sparse the term list is.
class HarmonicProfile {
public:
    HarmonicProfile() = default;
    explicit HarmonicProfile(std::vector<Harmonic> terms);

    static HarmonicProfile sine(int m, double amplitude);
    static HarmonicProfile cosine(int m, double amplitude);

    double operator()(double x) const;
    double derivative(double x) const;
    std::pair<double, double> value_and_derivative(double x) const;

    const std::vector<Harmonic>& terms() const { return terms_; }
    int max_harmonic() const { return terms_.empty() ? 0 : terms_.back().m; }

    /// True when every coefficient is exactly zero (or there are no terms).
    bool is_zero() const;

    HarmonicProfile scaled(double factor) const;
    /// Keeps only the terms whose index is a multiple of q.
    HarmonicProfile multiples_of(int q) const;

    friend HarmonicProfile operator+(const HarmonicProfile& lhs, const HarmonicProfile& rhs);

private:
    std::vector<Harmonic> terms_;
    // dense coefficient tables indexed by m (index 0 unused)
    std::vector<double> cos_;
    std::vector<double> sin_;
};

}  // namespace circlerot
