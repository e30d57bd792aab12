#pragma once

// Derivative of the rotation number at a rigid rational rotation.
//
// For F(x, mu) = x + p/q + mu (a + psi(x)) + O(mu^2) let Psi be the part of
// psi carried by harmonics divisible by q.  If a + Psi keeps one strict sign
// the rotation number is differentiable at mu = 0 with slope 1/T0,
// T0 = int_0^1 dx / (a + Psi(x)); if a + Psi changes sign the family is mode
// locked at p/q near mu = 0.

#include <cstddef>
#include <optional>
#include <variant>

#include "circlerot/family.hpp"
#include "circlerot/spectral.hpp"

namespace circlerot {

enum class Transversality { transversal, mode_locked, indeterminate };

const char* to_string(Transversality t);

struct SlopeReport {
    Transversality classification = Transversality::indeterminate;
    std::optional<double> T0;
    double slope = 0.0;
    double min_a_psi = 0.0;
    double max_a_psi = 0.0;
    double quadrature_error = 0.0;
    /// a + Psi < 0 everywhere: mu was reflected, T0 and slope are negative.
    bool reflected = false;
    ResonantProfile resonant_profile;
};

struct PredictOptions {
    /// |min(a + Psi)| at or below this is the tangential boundary case.
    double tolerance = 1e-9;
    double quadrature_tol = 1e-12;
    std::size_t quadrature_start = 64;
    std::size_t quadrature_cap = std::size_t{1} << 20;
};

SlopeReport classify_and_predict(const SmoothFamily& family, const PredictOptions& options = {});

/// Same, but throws EstimationError("indeterminate transversality") on the
/// boundary case instead of returning it.
SlopeReport require_verdict(const SmoothFamily& family, const PredictOptions& options = {});

/// The slope a obtained when no resonant harmonics survive.
double brunovsky_slope(const SmoothFamily& family);

/// (q int_0^1 dx / dF^q/dmu(x, 0))^{-1} with the integrand from chain-rule
/// propagation through q iterates (no Fourier analysis), trapezoid on `grid`
/// nodes.  Throws EstimationError if the sensitivity is not of one strict sign.
double parkhe_slope(const SmoothFamily& family, std::size_t grid = 8192);

namespace closed_forms {

/// Arnold map through (0, 0) with alpha' = a, beta' = b: sign(a) sqrt(a^2 - b^2), |a| > |b|.
struct ArnoldQ1 {
    double a;
    double b;
};
/// Modified Arnold map through (1/2, 0, 0): sqrt(a^2 - c^2), a > |c|.
struct ModifiedQ2 {
    double a;
    double c;
};
/// Modified Arnold map through (0, 0, 0) with a = 1 + u^2/2, b = 2u, c = -u^2/2:
/// (1 - u^2)^{3/2}, |u| < 1/2.
struct ModifiedU {
    double u;
};

}  // namespace closed_forms

using ClosedFormCase = std::variant<closed_forms::ArnoldQ1, closed_forms::ModifiedQ2, closed_forms::ModifiedU>;

/// Throws std::domain_error when the case-specific condition fails.
double closed_form(const ClosedFormCase& which);

}  // namespace circlerot
