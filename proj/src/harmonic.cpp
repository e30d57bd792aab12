#include "circlerot/harmonic.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace circlerot {

HarmonicProfile::HarmonicProfile(std::vector<Harmonic> terms) : terms_(std::move(terms))
{
    int previous = 0;
    for (const Harmonic& term : terms_) {
        if (term.m < 1)
            throw std::invalid_argument("harmonic index must be >= 1 (zero-mean profile), got " +
                                        std::to_string(term.m));
        if (term.m <= previous)
            throw std::invalid_argument("harmonic indices must be strictly increasing");
        if (!std::isfinite(term.cos_coeff) || !std::isfinite(term.sin_coeff))
            throw std::invalid_argument("harmonic coefficients must be finite");
        previous = term.m;
    }
    const int top = max_harmonic();
    cos_.assign(top + 1, 0.0);
    sin_.assign(top + 1, 0.0);
    for (const Harmonic& term : terms_) {
        cos_[term.m] = term.cos_coeff;
        sin_[term.m] = term.sin_coeff;
    }
}

HarmonicProfile HarmonicProfile::sine(int m, double amplitude)
{
    return HarmonicProfile({{m, 0.0, amplitude}});
}

HarmonicProfile HarmonicProfile::cosine(int m, double amplitude)
{
    return HarmonicProfile({{m, amplitude, 0.0}});
}

std::pair<double, double> HarmonicProfile::value_and_derivative(double x) const
{
    if (terms_.empty())
        return {0.0, 0.0};
    const double t = x - std::floor(x);
    const double c1 = std::cos(kTwoPi * t);
    const double s1 = std::sin(kTwoPi * t);
    double c = c1, s = s1;
    double value = 0.0, slope = 0.0;
    const int top = max_harmonic();
    for (int m = 1; m <= top; ++m) {
        value += cos_[m] * c + sin_[m] * s;
        slope += m * (sin_[m] * c - cos_[m] * s);
        const double cn = c * c1 - s * s1;
        s = s * c1 + c * s1;
        c = cn;
    }
    return {value, kTwoPi * slope};
}

double HarmonicProfile::operator()(double x) const
{
    if (terms_.empty())
        return 0.0;
    const double t = x - std::floor(x);
    const double c1 = std::cos(kTwoPi * t);
    const double s1 = std::sin(kTwoPi * t);
    double c = c1, s = s1;
    double value = 0.0;
    const int top = max_harmonic();
    for (int m = 1; m <= top; ++m) {
        value += cos_[m] * c + sin_[m] * s;
        const double cn = c * c1 - s * s1;
        s = s * c1 + c * s1;
        c = cn;
    }
    return value;
}

double HarmonicProfile::derivative(double x) const
{
    return value_and_derivative(x).second;
}

bool HarmonicProfile::is_zero() const
{
    for (const Harmonic& term : terms_)
        if (term.cos_coeff != 0.0 || term.sin_coeff != 0.0)
            return false;
    return true;
}

HarmonicProfile HarmonicProfile::scaled(double factor) const
{
    std::vector<Harmonic> out = terms_;
    for (Harmonic& term : out) {
        term.cos_coeff *= factor;
        term.sin_coeff *= factor;
    }
    return HarmonicProfile(std::move(out));
}

HarmonicProfile HarmonicProfile::multiples_of(int q) const
{
    if (q < 1)
        throw std::invalid_argument("multiples_of: q must be >= 1");
    std::vector<Harmonic> out;
    for (const Harmonic& term : terms_)
        if (term.m % q == 0)
            out.push_back(term);
    return HarmonicProfile(std::move(out));
}

HarmonicProfile operator+(const HarmonicProfile& lhs, const HarmonicProfile& rhs)
{
    std::map<int, Harmonic> merged;
    for (const auto* side : {&lhs, &rhs})
        for (const Harmonic& term : side->terms()) {
            auto [it, inserted] = merged.try_emplace(term.m, term);
            if (!inserted) {
                it->second.cos_coeff += term.cos_coeff;
                it->second.sin_coeff += term.sin_coeff;
            }
        }
    std::vector<Harmonic> out;
    out.reserve(merged.size());
    for (const auto& [m, term] : merged)
        out.push_back(term);
    return HarmonicProfile(std::move(out));
}

}  // namespace circlerot
