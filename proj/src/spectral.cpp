#include "circlerot/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace circlerot {

Spectrum::Spectrum(int max_harmonic, std::size_t sample_count, std::vector<std::complex<double>> coefficients,
                   double residual_energy)
    : max_harmonic_(max_harmonic),
      sample_count_(sample_count),
      coefficients_(std::move(coefficients)),
      residual_energy_(residual_energy)
{
    if (coefficients_.size() != static_cast<std::size_t>(2 * max_harmonic_ + 1))
        throw std::invalid_argument("spectrum: coefficient count does not match 2M+1");
}

std::complex<double> Spectrum::operator[](int m) const
{
    if (m < -max_harmonic_ || m > max_harmonic_)
        return {0.0, 0.0};
    return coefficients_[static_cast<std::size_t>(m + max_harmonic_)];
}

HarmonicProfile Spectrum::synthesize(double drop_below) const
{
    std::vector<Harmonic> terms;
    for (int m = 1; m <= max_harmonic_; ++m) {
        const std::complex<double> c = (*this)[m];
        if (std::abs(c) <= drop_below)
            continue;
        terms.push_back({m, 2.0 * c.real(), -2.0 * c.imag()});
    }
    return HarmonicProfile(std::move(terms));
}

Spectrum analyze_samples(std::span<const double> samples, int max_harmonic)
{
    const std::size_t n = samples.size();
    if (max_harmonic < 0)
        throw std::invalid_argument("analyze: max harmonic must be >= 0");
    if (n <= static_cast<std::size_t>(2 * max_harmonic))
        throw std::invalid_argument("aliasing risk: need N > 2M (N=" + std::to_string(n) +
                                    ", M=" + std::to_string(max_harmonic) + ")");

    std::vector<std::complex<double>> roots(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double angle = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        roots[k] = {std::cos(angle), std::sin(angle)};
    }

    double scale = 0.0, energy = 0.0, mean = 0.0;
    for (double s : samples) {
        scale = std::max(scale, std::abs(s));
        energy += s * s;
        mean += s;
    }
    energy /= static_cast<double>(n);
    mean /= static_cast<double>(n);
    if (std::abs(mean) > 1e-10 * std::max(1.0, scale))
        throw std::invalid_argument("profile samples have nonzero mean " + std::to_string(mean) +
                                    "; fold the mean into the drift");

    const int M = max_harmonic;
    std::vector<std::complex<double>> coeffs(static_cast<std::size_t>(2 * M + 1));
    double explained = 0.0;
    for (int m = -M; m <= M; ++m) {
        std::complex<double> acc{0.0, 0.0};
        if (m != 0) {
            const auto step = static_cast<std::size_t>(((m % static_cast<long>(n)) + static_cast<long>(n)) %
                                                       static_cast<long>(n));
            std::size_t index = 0;
            for (std::size_t j = 0; j < n; ++j) {
                acc += samples[j] * roots[index];
                index += step;
                if (index >= n)
                    index -= n;
            }
            acc /= static_cast<double>(n);
        }
        coeffs[static_cast<std::size_t>(m + M)] = acc;
        explained += std::norm(acc);
    }
    return Spectrum(M, n, std::move(coeffs), std::max(0.0, energy - explained));
}

Spectrum analyze(const std::function<double(double)>& psi, int max_harmonic, std::size_t sample_count)
{
    if (sample_count <= static_cast<std::size_t>(2 * std::max(max_harmonic, 0)))
        throw std::invalid_argument("aliasing risk: need N > 2M");
    std::vector<double> samples(sample_count);
    for (std::size_t j = 0; j < sample_count; ++j)
        samples[j] = psi(static_cast<double>(j) / static_cast<double>(sample_count));
    return analyze_samples(samples, max_harmonic);
}

Spectrum analyze(const HarmonicProfile& psi, int max_harmonic, std::size_t sample_count)
{
    return analyze([&psi](double x) { return psi(x); }, max_harmonic, sample_count);
}

ResonantProfile resonant(const Spectrum& spectrum, int q, double threshold)
{
    if (q < 1)
        throw std::invalid_argument("resonant: q must be >= 1");
    double largest = 0.0;
    for (int m = 1; m <= spectrum.max_harmonic(); ++m)
        largest = std::max(largest, std::abs(spectrum[m]));
    const double cutoff = threshold * (1.0 + largest);
    std::vector<Harmonic> terms;
    for (int m = q; m <= spectrum.max_harmonic(); m += q) {
        const std::complex<double> c = spectrum[m];
        if (std::abs(c) <= cutoff)
            continue;
        terms.push_back({m, 2.0 * c.real(), -2.0 * c.imag()});
    }
    return {q, HarmonicProfile(std::move(terms))};
}

ResonantProfile resonant(const HarmonicProfile& psi, int q)
{
    return {q, psi.multiples_of(q)};
}

namespace {

template <class F>
std::pair<double, double> golden_min(const F& f, double lo, double hi)
{
    constexpr double inv_phi = 0.6180339887498948482;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > 1e-12) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

// min over one period of f, refining the lowest local grid minima.
template <class F>
std::pair<double, double> periodic_min(const F& f)
{
    constexpr int grid = kExtremaGrid;
    constexpr double h = 1.0 / grid;
    std::vector<double> v(grid);
    for (int j = 0; j < grid; ++j)
        v[j] = f(j * h);
    std::vector<int> candidates;
    for (int j = 0; j < grid; ++j) {
        const double left = v[(j + grid - 1) % grid];
        const double right = v[(j + 1) % grid];
        if (v[j] <= left && v[j] <= right)
            candidates.push_back(j);
    }
    std::sort(candidates.begin(), candidates.end(), [&](int a, int b) { return v[a] < v[b]; });
    if (candidates.size() > 8)
        candidates.resize(8);
    double best_x = 0.0, best = v[0];
    for (int j = 0; j < grid; ++j)
        if (v[j] < best) {
            best = v[j];
            best_x = j * h;
        }
    for (int j : candidates) {
        const auto [x, value] = golden_min(f, (j - 1) * h, (j + 1) * h);
        if (value < best) {
            best = value;
            best_x = x - std::floor(x);
        }
    }
    return {best_x, best};
}

}  // namespace

Extrema extrema(double a, const HarmonicProfile& profile)
{
    if (profile.is_zero())
        return {a, 0.0, a, 0.0};
    const auto [argmin, low] = periodic_min([&](double x) { return a + profile(x); });
    const auto [argmax, negated] = periodic_min([&](double x) { return -(a + profile(x)); });
    return {low, argmin, -negated, argmax};
}

}  // namespace circlerot
