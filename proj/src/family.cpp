#include "circlerot/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "circlerot/errors.hpp"

namespace circlerot {

namespace {

std::int64_t floor_div(std::int64_t p, std::int64_t q)
{
    std::int64_t d = p / q;
    if ((p % q != 0) && ((p < 0) != (q < 0)))
        --d;
    return d;
}

std::int64_t floor_mod(std::int64_t p, std::int64_t q)
{
    return p - floor_div(p, q) * q;
}

void check_rest(const Rational& rest)
{
    if (rest.q < 1)
        throw FamilyError("rational rotation needs q >= 1");
    if (!rest.coprime()) {
        std::ostringstream msg;
        msg << "p and q must be coprime, got " << rest.p << "/" << rest.q;
        throw FamilyError(msg.str());
    }
}

std::string mu_text(double mu)
{
    std::ostringstream out;
    out.precision(17);
    out << mu;
    return out.str();
}

}  // namespace

bool Rational::coprime() const
{
    return q >= 1 && std::gcd(p, q) == 1;
}

FixedLift::FixedLift(std::int64_t integer_shift, double offset, HarmonicProfile profile)
    : integer_(integer_shift), offset_(offset), profile_(std::move(profile))
{
}

SmoothFamily SmoothFamily::generic(Rational rest, double drift, HarmonicProfile psi,
                                   SecondOrderTerm g, FamilyOptions options)
{
    check_rest(rest);
    if (!std::isfinite(drift) || !std::isfinite(g.constant))
        throw FamilyError("family coefficients must be finite");
    SmoothFamily family;
    family.kind_ = FamilyKind::generic;
    family.rest_ = rest;
    family.integer_ = floor_div(rest.p, rest.q);
    family.fraction_ = static_cast<double>(floor_mod(rest.p, rest.q)) / static_cast<double>(rest.q);
    family.drift_ = drift;
    family.psi_ = std::move(psi);
    family.g_ = std::move(g);
    family.finish(options);
    return family;
}

SmoothFamily SmoothFamily::arnold(AffinePath alpha, AffinePath beta, FamilyOptions options)
{
    return modified_arnold(alpha, beta, AffinePath{}, options);
}

SmoothFamily SmoothFamily::modified_arnold(AffinePath alpha, AffinePath beta, AffinePath gamma,
                                           FamilyOptions options)
{
    for (double v : {alpha.value, alpha.derivative, beta.value, beta.derivative, gamma.value,
                     gamma.derivative})
        if (!std::isfinite(v))
            throw FamilyError("path values must be finite");

    SmoothFamily family;
    const bool has_gamma = gamma.value != 0.0 || gamma.derivative != 0.0;
    family.kind_ = has_gamma ? FamilyKind::modified_arnold : FamilyKind::arnold;
    family.alpha_ = alpha;
    family.beta_ = beta;
    if (has_gamma)
        family.gamma_ = gamma;

    family.base_ = HarmonicProfile({{1, 0.0, beta.value}, {2, gamma.value, 0.0}});
    family.psi_ = HarmonicProfile({{1, 0.0, beta.derivative}, {2, gamma.derivative, 0.0}});
    family.drift_ = alpha.derivative;

    const bool rigid_at_zero = beta.value == 0.0 && gamma.value == 0.0;
    if (options.rest) {
        const Rational rest = *options.rest;
        check_rest(rest);
        if (!rigid_at_zero || std::abs(alpha.value - rest.value()) > 1e-12) {
            std::ostringstream msg;
            msg << "family is not the rigid rotation by " << rest.p << "/" << rest.q << " at mu=0";
            throw FamilyError(msg.str());
        }
        family.rest_ = rest;
        family.integer_ = floor_div(rest.p, rest.q);
        family.fraction_ = static_cast<double>(floor_mod(rest.p, rest.q)) / static_cast<double>(rest.q);
    } else {
        const double whole = std::floor(alpha.value);
        family.integer_ = static_cast<std::int64_t>(whole);
        family.fraction_ = alpha.value - whole;
        if (rigid_at_zero && family.fraction_ == 0.0)
            family.rest_ = Rational{family.integer_, 1};
    }
    family.finish(options);
    return family;
}

Rational SmoothFamily::require_rest() const
{
    if (!rest_)
        throw FamilyError("family is not a perturbation of a rigid rational rotation at mu=0");
    return *rest_;
}

double SmoothFamily::min_slope_on_grid(double mu_lo, double mu_hi) const
{
    double lowest = std::numeric_limits<double>::infinity();
    for (int j = 0; j < kHomeomorphismGrid; ++j) {
        const double x = static_cast<double>(j) / kHomeomorphismGrid;
        // slope(mu) = c0 + c1 mu + c2 mu^2
        const double c0 = 1.0 + base_.derivative(x);
        const double c1 = psi_.derivative(x);
        const double c2 = g_.profile.derivative(x);
        auto slope = [&](double mu) { return c0 + mu * (c1 + mu * c2); };
        double m = std::min(slope(mu_lo), slope(mu_hi));
        if (c2 > 0.0) {
            const double vertex = -c1 / (2.0 * c2);
            if (vertex > mu_lo && vertex < mu_hi)
                m = std::min(m, slope(vertex));
        }
        lowest = std::min(lowest, m);
    }
    return lowest;
}

void SmoothFamily::finish(const FamilyOptions& options)
{
    if (options.window && !(*options.window > 0.0 && std::isfinite(*options.window)))
        throw FamilyError("window must be positive and finite");

    checked_ = options.require_homeomorphism;
    if (!checked_) {
        window_ = options.window.value_or(kMaxWindow);
        return;
    }
    if (min_slope_on_grid(0.0, 0.0) <= 0.0)
        throw FamilyError("not a homeomorphism at mu=0");
    if (options.window) {
        const double w = *options.window;
        if (min_slope_on_grid(-w, w) <= 0.0)
            throw FamilyError("not a homeomorphism on the window |mu| <= " + mu_text(w));
        window_ = w;
        return;
    }
    if (min_slope_on_grid(-kMaxWindow, kMaxWindow) > 0.0) {
        window_ = kMaxWindow;
        return;
    }
    double good = 0.0, bad = kMaxWindow;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (good + bad);
        (min_slope_on_grid(-mid, mid) > 0.0 ? good : bad) = mid;
    }
    if (good <= 0.0)
        throw FamilyError("no homeomorphism window around mu=0");
    window_ = good;
}

bool SmoothFamily::contains(double mu) const
{
    return std::abs(mu) <= window_;
}

FixedLift SmoothFamily::at(double mu) const
{
    if (!contains(mu))
        throw WindowError("not a homeomorphism at mu=" + mu_text(mu) + " (window " + mu_text(window_) + ")");
    HarmonicProfile profile = base_ + psi_.scaled(mu);
    if (!g_.profile.is_zero())
        profile = profile + g_.profile.scaled(mu * mu);
    return FixedLift(integer_, fraction_ + mu * drift_ + mu * mu * g_.constant, std::move(profile));
}

SmoothFamily SmoothFamily::shifted(std::int64_t k) const
{
    SmoothFamily out = *this;
    out.integer_ += k;
    if (out.rest_)
        out.rest_->p += k * out.rest_->q;
    if (out.alpha_)
        out.alpha_->value += static_cast<double>(k);
    return out;
}

double SmoothFamily::dx(double x, double mu) const
{
    return 1.0 + base_.derivative(x) + mu * psi_.derivative(x) + mu * mu * g_.profile.derivative(x);
}

double SmoothFamily::dmu(double x, double mu) const
{
    return drift_ + psi_(x) + 2.0 * mu * g_(x);
}

double eval(const SmoothFamily& family, double x, double mu)
{
    return family.at(mu)(x);
}

double iterate(const SmoothFamily& family, double x0, double mu, std::int64_t n)
{
    if (n < 0)
        throw std::invalid_argument("iterate: negative iteration count");
    const FixedLift lift = family.at(mu);
    double x = x0;
    for (std::int64_t i = 0; i < n; ++i)
        x = lift(x);
    return x;
}

LiftValue propagate(const SmoothFamily& family, LiftValue x, double mu)
{
    const FixedLift lift = family.at(mu);
    return {lift(x.value), family.dx(x.value, mu) * x.mu_derivative + family.dmu(x.value, mu)};
}

double mu_sensitivity(const SmoothFamily& family, double x, std::int64_t n, double mu)
{
    if (n < 0)
        throw std::invalid_argument("mu_sensitivity: negative iteration count");
    const FixedLift lift = family.at(mu);
    LiftValue state{x, 0.0};
    for (std::int64_t i = 0; i < n; ++i) {
        const double next = lift(state.value);
        state.mu_derivative = family.dx(state.value, mu) * state.mu_derivative + family.dmu(state.value, mu);
        state.value = next;
    }
    return state.mu_derivative;
}

QExpansion::QExpansion(Rational rest, double drift, HarmonicProfile psi)
    : rest_(rest), drift_(drift), psi_(std::move(psi))
{
    check_rest(rest_);
}

double QExpansion::first_order(double x) const
{
    double sum = 0.0;
    for (std::int64_t r = 0; r < rest_.q; ++r) {
        const double shift = static_cast<double>(floor_mod(r * rest_.p, rest_.q)) / static_cast<double>(rest_.q);
        sum += drift_ + psi_(x + shift);
    }
    return sum;
}

QExpansion q_expand(const SmoothFamily& family)
{
    return QExpansion(family.require_rest(), family.drift(), family.psi());
}

}  // namespace circlerot
