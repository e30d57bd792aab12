#pragma once

// Fourier coefficients of zero-mean profiles and their q-resonant parts.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "circlerot/harmonic.hpp"

namespace circlerot {

/// Complex coefficients c_m, m in [-M, M], of psi(x) = sum c_m exp(2 pi i m x).
class Spectrum {
public:
    Spectrum(int max_harmonic, std::size_t sample_count, std::vector<std::complex<double>> coefficients,
             double residual_energy);

    int max_harmonic() const { return max_harmonic_; }
    std::size_t sample_count() const { return sample_count_; }
    /// c_m for |m| <= M, zero outside.
    std::complex<double> operator[](int m) const;
    /// Sample energy not explained by harmonics |m| <= M (zero for trigonometric
    /// polynomials of degree <= M, up to rounding).
    double residual_energy() const { return residual_energy_; }

    /// Real form sum (C_m cos + S_m sin) with C_m = 2 Re c_m, S_m = -2 Im c_m.
    /// Coefficients below `drop_below` in magnitude are omitted.
    HarmonicProfile synthesize(double drop_below = 0.0) const;

private:
    int max_harmonic_;
    std::size_t sample_count_;
    std::vector<std::complex<double>> coefficients_;  // index m + M
    double residual_energy_;
};

/// DFT c_m = (1/N) sum_j psi(j/N) exp(-2 pi i m j / N) by direct summation.
/// Throws std::invalid_argument ("aliasing risk") unless N > 2M.
Spectrum analyze(const HarmonicProfile& psi, int max_harmonic, std::size_t sample_count);
Spectrum analyze(const std::function<double(double)>& psi, int max_harmonic, std::size_t sample_count);
/// Samples psi(j/N), j = 0..N-1.  The sample mean must vanish (to 1e-10
/// relative to the sample scale) since the profile is zero-mean by definition.
Spectrum analyze_samples(std::span<const double> samples, int max_harmonic);

/// Sub-series of harmonics with index divisible by q.
struct ResonantProfile {
    int q = 1;
    HarmonicProfile terms;

    double operator()(double x) const { return terms(x); }
    bool empty() const { return terms.is_zero(); }
};

/// Coefficients with |c| <= threshold*(1 + max |c|) count as zero; the
/// default threshold sits well above DFT rounding.
inline constexpr double kResonanceThreshold = 1e-13;

ResonantProfile resonant(const Spectrum& spectrum, int q, double threshold = kResonanceThreshold);
/// Exact selection on a trigonometric polynomial.
ResonantProfile resonant(const HarmonicProfile& psi, int q);

struct Extrema {
    double min = 0.0;
    double argmin = 0.0;
    double max = 0.0;
    double argmax = 0.0;
};

inline constexpr int kExtremaGrid = 1 << 14;

/// min and max of a + Psi over one period: grid search followed by
/// golden-section refinement (to 1e-12 in x) around the best grid cells.
Extrema extrema(double a, const HarmonicProfile& profile);
inline Extrema extrema(double a, const ResonantProfile& profile) { return extrema(a, profile.terms); }

}  // namespace circlerot
