#include "circlerot/predict.hpp"

#include <cmath>
#include <stdexcept>

#include "circlerot/errors.hpp"
#include "circlerot/quadrature.hpp"

namespace circlerot {

const char* to_string(Transversality t)
{
    switch (t) {
    case Transversality::transversal:
        return "transversal";
    case Transversality::mode_locked:
        return "mode_locked";
    case Transversality::indeterminate:
        return "indeterminate";
    }
    return "unknown";
}

SlopeReport classify_and_predict(const SmoothFamily& family, const PredictOptions& options)
{
    const Rational rest = family.require_rest();
    const double a = family.drift();

    SlopeReport report;
    report.resonant_profile = resonant(family.psi(), static_cast<int>(rest.q));
    const Extrema range = extrema(a, report.resonant_profile);
    report.min_a_psi = range.min;
    report.max_a_psi = range.max;

    const double tol = options.tolerance;
    if (range.min > tol || range.max < -tol) {
        report.classification = Transversality::transversal;
        report.reflected = range.max < -tol;
        if (report.resonant_profile.empty()) {
            report.T0 = 1.0 / a;
            report.slope = a;
            return report;
        }
        const HarmonicProfile& Psi = report.resonant_profile.terms;
        const QuadratureResult T0 = periodic_trapezoid([&](double x) { return 1.0 / (a + Psi(x)); },
                                                       options.quadrature_tol, options.quadrature_start,
                                                       options.quadrature_cap);
        report.T0 = T0.value;
        report.quadrature_error = T0.error_estimate;
        report.slope = 1.0 / T0.value;
    } else if (range.min < -tol && range.max > tol) {
        report.classification = Transversality::mode_locked;
        report.slope = 0.0;
    } else {
        report.classification = Transversality::indeterminate;
        report.slope = 0.0;
    }
    return report;
}

SlopeReport require_verdict(const SmoothFamily& family, const PredictOptions& options)
{
    SlopeReport report = classify_and_predict(family, options);
    if (report.classification == Transversality::indeterminate)
        throw EstimationError("indeterminate transversality: min(a+Psi) is within tolerance of 0");
    return report;
}

double brunovsky_slope(const SmoothFamily& family)
{
    return family.drift();
}

double parkhe_slope(const SmoothFamily& family, std::size_t grid)
{
    const Rational rest = family.require_rest();
    if (grid < 2)
        throw std::invalid_argument("parkhe_slope: grid must have at least 2 nodes");
    double sum = 0.0;
    int sign = 0;
    for (std::size_t j = 0; j < grid; ++j) {
        const double x = static_cast<double>(j) / static_cast<double>(grid);
        const double s = mu_sensitivity(family, x, rest.q, 0.0);
        const int here = s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
        if (here == 0 || (sign != 0 && here != sign))
            throw EstimationError("non-positive sensitivity: dF^q/dmu(x,0) changes sign or vanishes");
        sign = here;
        sum += 1.0 / s;
    }
    const double integral = sum / static_cast<double>(grid);
    return 1.0 / (static_cast<double>(rest.q) * integral);
}

double closed_form(const ClosedFormCase& which)
{
    struct Visitor {
        double operator()(const closed_forms::ArnoldQ1& c) const
        {
            if (!(std::abs(c.a) > std::abs(c.b)))
                throw std::domain_error("arnold_q1 closed form needs |a| > |b|");
            return std::copysign(std::sqrt(c.a * c.a - c.b * c.b), c.a);
        }
        double operator()(const closed_forms::ModifiedQ2& c) const
        {
            if (!(c.a > std::abs(c.c)))
                throw std::domain_error("modified_q2 closed form needs a > |c|");
            return std::sqrt(c.a * c.a - c.c * c.c);
        }
        double operator()(const closed_forms::ModifiedU& c) const
        {
            if (!(std::abs(c.u) < 0.5))
                throw std::domain_error("modified_u closed form needs |u| < 1/2");
            return std::pow(1.0 - c.u * c.u, 1.5);
        }
    };
    return std::visit(Visitor{}, which);
}

}  // namespace circlerot
