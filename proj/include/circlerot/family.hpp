#pragma once

// One-parameter families of lifts of circle homeomorphisms,
//
//   F(x, mu) = x + omega0 + phi0(x) + mu*(a + psi(x)) + mu^2*(g0 + g(x)),
//
// where phi0, psi and g are zero-mean trigonometric polynomials. A family
// with phi0 == 0 and omega0 == p/q is a perturbation of the rigid rotation
// by p/q (the class the slope prediction works with); Arnold and modified
// Arnold maps with affine parameter paths are special cases.

#include <cstdint>
#include <optional>

#include "circlerot/harmonic.hpp"

namespace circlerot {

/// p/q with q >= 1.  Coprimality is checked where it matters.
struct Rational {
    std::int64_t p = 0;
    std::int64_t q = 1;

    double value() const { return static_cast<double>(p) / static_cast<double>(q); }
    bool coprime() const;
};

/// Affine parameter path: value + derivative*mu.
struct AffinePath {
    double value = 0.0;
    double derivative = 0.0;

    double at(double mu) const { return value + derivative * mu; }
};

/// mu-independent second-order term g0 + g(x).
struct SecondOrderTerm {
    double constant = 0.0;
    HarmonicProfile profile;

    bool is_zero() const { return constant == 0.0 && profile.is_zero(); }
    double operator()(double x) const { return constant + profile(x); }
};

enum class FamilyKind { generic, arnold, modified_arnold };

struct FamilyOptions {
    /// Homeomorphism window |mu| <= window.  When absent the largest window
    /// (capped at kMaxWindow) on which the grid check passes is used.
    std::optional<double> window;
    /// When false the grid check is skipped and `window` (default kMaxWindow)
    /// is taken as given.  Rotation estimates outside the invertible range
    /// are then reported without their usual guarantees.
    bool require_homeomorphism = true;
    /// For Arnold-type families: declare F(., 0) to be the rotation by p/q.
    std::optional<Rational> rest;
};

inline constexpr double kMaxWindow = 1.0;
inline constexpr int kHomeomorphismGrid = 4096;

/// The lift x -> F(x, mu) at one frozen parameter value.
///
/// Stores the integer part of the translation separately so that iterations
/// can run on the fractional part exactly and integer shifts of a family
/// change estimates by exactly that integer.
class FixedLift {
public:
    FixedLift(std::int64_t integer_shift, double offset, HarmonicProfile profile);

    double operator()(double x) const { return x + (static_cast<double>(integer_) + (offset_ + profile_(x))); }
    /// F(x) - integer_shift().
    double reduced(double x) const { return x + offset_ + profile_(x); }
    double displacement(double x) const { return static_cast<double>(integer_) + offset_ + profile_(x); }
    double derivative(double x) const { return 1.0 + profile_.derivative(x); }

    std::int64_t integer_shift() const { return integer_; }
    bool is_rigid() const { return profile_.is_zero(); }
    double translation() const { return static_cast<double>(integer_) + offset_; }

private:
    std::int64_t integer_;
    double offset_;
    HarmonicProfile profile_;
};

class SmoothFamily {
public:
    /// x + p/q + mu*(a + psi(x)) + mu^2*g(x).
    static SmoothFamily generic(Rational rest, double drift, HarmonicProfile psi,
                                SecondOrderTerm g = {}, FamilyOptions options = {});
    /// x + alpha(mu) + beta(mu) sin(2 pi x).
    static SmoothFamily arnold(AffinePath alpha, AffinePath beta, FamilyOptions options = {});
    /// x + alpha(mu) + beta(mu) sin(2 pi x) + gamma(mu) cos(4 pi x).
    static SmoothFamily modified_arnold(AffinePath alpha, AffinePath beta, AffinePath gamma,
                                        FamilyOptions options = {});

    FamilyKind kind() const { return kind_; }
    /// p/q when F(., 0) is the rigid rotation by p/q.
    const std::optional<Rational>& rest() const { return rest_; }
    bool in_class() const { return rest_.has_value(); }
    /// Like rest(), but throws FamilyError for families that are not rigid at 0.
    Rational require_rest() const;

    double drift() const { return drift_; }
    const HarmonicProfile& psi() const { return psi_; }
    const HarmonicProfile& base_profile() const { return base_; }
    const SecondOrderTerm& second_order() const { return g_; }
    double window() const { return window_; }
    bool homeomorphism_checked() const { return checked_; }

    const std::optional<AffinePath>& alpha() const { return alpha_; }
    const std::optional<AffinePath>& beta() const { return beta_; }
    const std::optional<AffinePath>& gamma() const { return gamma_; }

    /// Translation part omega0 of F(., 0).
    double base_translation() const { return static_cast<double>(integer_) + fraction_; }

    bool contains(double mu) const;
    /// Throws WindowError outside the window.
    FixedLift at(double mu) const;
    /// F + k.
    SmoothFamily shifted(std::int64_t k) const;

    /// dF/dx and dF/dmu at (x, mu).
    double dx(double x, double mu) const;
    double dmu(double x, double mu) const;

private:
    SmoothFamily() = default;
    void finish(const FamilyOptions& options);
    double min_slope_on_grid(double mu_lo, double mu_hi) const;

    FamilyKind kind_ = FamilyKind::generic;
    std::optional<Rational> rest_;
    std::int64_t integer_ = 0;
    double fraction_ = 0.0;
    double drift_ = 0.0;
    HarmonicProfile base_;
    HarmonicProfile psi_;
    SecondOrderTerm g_;
    double window_ = 0.0;
    bool checked_ = true;
    std::optional<AffinePath> alpha_, beta_, gamma_;
};

/// A lift value together with its first-order sensitivity in mu.
struct LiftValue {
    double value = 0.0;
    double mu_derivative = 0.0;
};

double eval(const SmoothFamily& family, double x, double mu);
/// F^n(x0, mu); n = 0 returns x0.
double iterate(const SmoothFamily& family, double x0, double mu, std::int64_t n);

/// One application of F with chain-rule propagation of d/dmu.
LiftValue propagate(const SmoothFamily& family, LiftValue x, double mu);
/// d F^n / d mu at (x, mu) by forward propagation.
double mu_sensitivity(const SmoothFamily& family, double x, std::int64_t n, double mu = 0.0);

/// First-order part of the q-th iterate of a family rigid at mu = 0:
/// F^q(x, mu) = x + p + mu*first_order(x) + O(mu^2).
class QExpansion {
public:
    QExpansion(Rational rest, double drift, HarmonicProfile psi);

    std::int64_t p() const { return rest_.p; }
    std::int64_t q() const { return rest_.q; }
    /// sum_{r<q} (a + psi(x + r p/q)) = q (a + Psi(x)).
    double first_order(double x) const;
    double operator()(double x) const { return first_order(x); }

private:
    Rational rest_;
    double drift_;
    HarmonicProfile psi_;
};

QExpansion q_expand(const SmoothFamily& family);

}  // namespace circlerot
