#include "circlerot/pwl.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "circlerot/errors.hpp"

namespace circlerot {

namespace {

std::string describe(const char* what, std::size_t index, double mu)
{
    std::ostringstream out;
    out.precision(12);
    out << what << " at piece " << index + 1 << ", mu=" << mu;
    return out.str();
}

// Real roots of c0 + c1 mu + c2 mu^2 in [lo, hi].
std::vector<double> roots_in(double c0, double c1, double c2, double lo, double hi)
{
    std::vector<double> roots;
    const double scale = std::max({std::abs(c0), std::abs(c1), std::abs(c2), 1e-300});
    if (std::abs(c2) <= 1e-14 * scale) {
        if (std::abs(c1) > 1e-14 * scale)
            roots.push_back(-c0 / c1);
    } else {
        const double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc >= 0.0) {
            const double t = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
            if (t != 0.0) {
                roots.push_back(t / c2);
                roots.push_back(c0 / t);
            } else {
                roots.push_back(0.0);
            }
        }
    }
    std::vector<double> inside;
    for (double r : roots)
        if (r >= lo && r <= hi)
            inside.push_back(r);
    return inside;
}

struct BreakSource {
    double x;
    double velocity;
};

// Points F0^{-r}(b_k) mod 1 for r < q, with d/dmu of the point at mu = 0.
std::vector<BreakSource> break_sources(const PWLFamily& family, const FixedPWL& f0, std::int64_t q)
{
    std::vector<BreakSource> sources;
    const double b1 = f0.breaks().front();
    for (std::size_t k = 0; k < family.size(); ++k) {
        double y = f0.breaks()[k];
        double dy = family.breaks()[k].db;
        for (std::int64_t r = 0; r < q; ++r) {
            sources.push_back({y - std::floor(y), dy});
            const double z = f0.inverse(y);
            const std::size_t j = f0.piece_of(z);
            const double offset = z - std::floor(z - b1) - f0.breaks()[j];
            // F(z(mu), mu) = y(mu) on piece j
            dy = family.breaks()[j].db
                 + (dy - family.values()[j].da - family.slope_derivative(j, 0.0) * offset) / f0.slopes()[j];
            y = z;
        }
    }
    std::sort(sources.begin(), sources.end(),
              [](const BreakSource& l, const BreakSource& r) { return l.x < r.x; });
    return sources;
}

bool same_velocity(double u, double v)
{
    return std::abs(u - v) <= 1e-8 * std::max({1.0, std::abs(u), std::abs(v)});
}

// Break set of F0^q on [0,1).  Coincident points are merged; with
// check_collisions, points that coincide at mu = 0 but move apart for mu != 0
// are rejected.
std::vector<double> iterate_break_set(const PWLFamily& family, const FixedPWL& f0, std::int64_t q,
                                      bool check_collisions)
{
    const std::vector<BreakSource> sources = break_sources(family, f0, q);
    std::vector<BreakSource> merged;
    auto absorb = [&](const BreakSource& into, const BreakSource& s) {
        if (check_collisions && !same_velocity(into.velocity, s.velocity)) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "duplicate break collision at gamma=" << s.x << ": break orbits with velocities "
                << into.velocity << " and " << s.velocity << " separate for mu != 0";
            throw FamilyError(msg.str());
        }
    };
    for (const BreakSource& s : sources) {
        if (!merged.empty() && s.x - merged.back().x <= kBreakMergeTolerance)
            absorb(merged.back(), s);
        else
            merged.push_back(s);
    }
    if (merged.size() > 1 && merged.front().x + 1.0 - merged.back().x <= kBreakMergeTolerance) {
        absorb(merged.front(), merged.back());
        merged.pop_back();
    }
    std::vector<double> points;
    points.reserve(merged.size());
    for (const BreakSource& s : merged)
        points.push_back(s.x);
    return points;
}

}  // namespace

FixedPWL::FixedPWL(std::vector<double> breaks, std::vector<double> values)
    : breaks_(std::move(breaks)), values_(std::move(values))
{
    const std::size_t n = breaks_.size();
    if (n == 0 || values_.size() != n)
        throw FamilyError("PWL lift needs matching, nonempty break and value lists");
    slopes_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double b_next = k + 1 < n ? breaks_[k + 1] : breaks_[0] + 1.0;
        const double a_next = k + 1 < n ? values_[k + 1] : values_[0] + 1.0;
        slopes_[k] = (a_next - values_[k]) / (b_next - breaks_[k]);
    }
}

std::size_t FixedPWL::piece_of(double x) const
{
    const double y = x - std::floor(x - breaks_.front());
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), y);
    return it == breaks_.begin() ? 0 : static_cast<std::size_t>(it - breaks_.begin()) - 1;
}

double FixedPWL::operator()(double x) const
{
    const double n = std::floor(x - breaks_.front());
    const double y = x - n;
    const std::size_t i = piece_of(x);
    return values_[i] + slopes_[i] * (y - breaks_[i]) + n;
}

double FixedPWL::slope_at(double x) const
{
    return slopes_[piece_of(x)];
}

double FixedPWL::inverse(double y) const
{
    const double n = std::floor(y - values_.front());
    const double z = y - n;
    const auto it = std::upper_bound(values_.begin(), values_.end(), z);
    const std::size_t i = it == values_.begin() ? 0 : static_cast<std::size_t>(it - values_.begin()) - 1;
    return breaks_[i] + (z - values_[i]) / slopes_[i] + n;
}

PWLFamily::PWLFamily(std::vector<BreakPath> breaks, std::vector<ValuePath> values, double window)
    : breaks_(std::move(breaks)), values_(std::move(values)), window_(window)
{
    if (breaks_.empty() || breaks_.size() != values_.size())
        throw FamilyError("PWL family needs N >= 1 breaks and N values");
    for (std::size_t k = 0; k < breaks_.size(); ++k)
        for (double v : {breaks_[k].b0, breaks_[k].db, values_[k].a0, values_[k].da})
            if (!std::isfinite(v))
                throw FamilyError("PWL family data must be finite");
    if (!(breaks_.front().b0 >= 0.0 && breaks_.front().b0 < 1.0))
        throw FamilyError("first break point must lie in [0, 1) at mu=0");
    if (!(window_ > 0.0 && std::isfinite(window_)))
        throw FamilyError("PWL window must be positive");
}

PWLFamily PWLFamily::from_normal_form(const PWLNormalForm& nf, double window)
{
    const double shift = std::floor(nf.pieces().front().gamma);
    std::vector<BreakPath> breaks;
    std::vector<ValuePath> values;
    for (const NormalPiece& piece : nf.pieces()) {
        const double gamma = piece.gamma - shift;
        breaks.push_back({gamma, 0.0});
        values.push_back({gamma + static_cast<double>(nf.p()), piece.A});
    }
    return PWLFamily(std::move(breaks), std::move(values), window);
}

double PWLFamily::break_at(std::size_t k, double mu) const
{
    const std::size_t n = size();
    return k < n ? breaks_[k].at(mu) : breaks_[k - n].at(mu) + 1.0;
}

double PWLFamily::value_at(std::size_t k, double mu) const
{
    const std::size_t n = size();
    return k < n ? values_[k].at(mu) : values_[k - n].at(mu) + 1.0;
}

double PWLFamily::slope(std::size_t k, double mu) const
{
    return (value_at(k + 1, mu) - value_at(k, mu)) / (break_at(k + 1, mu) - break_at(k, mu));
}

double PWLFamily::slope_derivative(std::size_t k, double mu) const
{
    const std::size_t n = size();
    const double da = values_[(k + 1) % n].da - values_[k].da;
    const double db = breaks_[(k + 1) % n].db - breaks_[k].db;
    const double wa = value_at(k + 1, mu) - value_at(k, mu);
    const double wb = break_at(k + 1, mu) - break_at(k, mu);
    return (da * wb - wa * db) / (wb * wb);
}

FixedPWL PWLFamily::at(double mu) const
{
    if (std::abs(mu) > window_) {
        std::ostringstream msg;
        msg << "not a homeomorphism at mu=" << mu << " (PWL window " << window_ << ")";
        throw WindowError(msg.str());
    }
    std::vector<double> b(size()), a(size());
    for (std::size_t k = 0; k < size(); ++k) {
        b[k] = breaks_[k].at(mu);
        a[k] = values_[k].at(mu);
    }
    return FixedPWL(std::move(b), std::move(a));
}

bool ValidationReport::homeomorphic() const
{
    return std::none_of(violations.begin(), violations.end(), [](const Violation& v) { return v.fatal(); });
}

ValidationReport validate(const PWLFamily& family, double window)
{
    ValidationReport report;
    const std::size_t n = family.size();
    const std::array<double, 3> probes{-window, 0.0, window};
    // widths of breaks and values are affine in mu: endpoints decide
    for (std::size_t k = 0; k < n; ++k) {
        for (double mu : probes) {
            if (!(family.break_at(k + 1, mu) - family.break_at(k, mu) > 0.0)) {
                report.violations.push_back({Violation::Clause::ordering, k, mu,
                                             describe("break points not increasing", k, mu)});
                break;
            }
        }
        for (double mu : probes) {
            if (!(family.value_at(k + 1, mu) - family.value_at(k, mu) > 0.0)) {
                report.violations.push_back({Violation::Clause::positivity, k, mu,
                                             describe("slope not positive", k, mu)});
                break;
            }
        }
    }
    if (n < 2)
        return report;
    // s_k = s_{k+1}  <=>  wa_k wb_{k+1} - wa_{k+1} wb_k = 0, a quadratic in mu
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = (k + 1) % n;
        auto width = [&](std::size_t i, bool values) {
            const std::size_t next = i + 1;
            const double at0 = values ? family.value_at(next, 0.0) - family.value_at(i, 0.0)
                                      : family.break_at(next, 0.0) - family.break_at(i, 0.0);
            const double d = values ? family.values()[next % n].da - family.values()[i].da
                                    : family.breaks()[next % n].db - family.breaks()[i].db;
            return std::pair{at0, d};
        };
        const auto [ak0, ak1] = width(k, true);
        const auto [bk0, bk1] = width(k, false);
        const auto [aj0, aj1] = width(j, true);
        const auto [bj0, bj1] = width(j, false);
        const double c0 = ak0 * bj0 - aj0 * bk0;
        const double c1 = ak0 * bj1 + ak1 * bj0 - aj0 * bk1 - aj1 * bk0;
        const double c2 = ak1 * bj1 - aj1 * bk1;
        const double scale = std::max({std::abs(ak0 * bj0), std::abs(aj0 * bk0), 1e-300});
        if (std::abs(c0) <= 1e-14 * scale && std::abs(c1) <= 1e-14 * scale && std::abs(c2) <= 1e-14 * scale) {
            report.violations.push_back({Violation::Clause::distinct_slopes, k, 0.0,
                                         describe("adjacent slopes equal on the whole window", k, 0.0)});
            continue;
        }
        for (double mu : roots_in(c0, c1, c2, -window, window))
            report.violations.push_back({Violation::Clause::distinct_slopes, k, mu,
                                         describe("adjacent slopes coincide", k, mu)});
    }
    return report;
}

bool rigid_check(const PWLFamily& family, Rational rest, double tol)
{
    if (!rest.coprime())
        throw FamilyError("p and q must be coprime");
    const FixedPWL f0 = family.at(0.0);
    const std::vector<double> cuts = iterate_break_set(family, f0, rest.q, false);
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        const double lo = cuts[i];
        const double hi = i + 1 < cuts.size() ? cuts[i + 1] : cuts.front() + 1.0;
        const double m = 0.5 * (lo + hi);
        double x = m, slope = 1.0;
        for (std::int64_t r = 0; r < rest.q; ++r) {
            slope *= f0.slope_at(x);
            x = f0(x);
        }
        if (std::abs(slope - 1.0) > tol || std::abs(x - m - static_cast<double>(rest.p)) > tol)
            return false;
    }
    return true;
}

PWLNormalForm::PWLNormalForm(Rational rest, std::vector<NormalPiece> pieces, double continuity_tol)
    : rest_(rest), pieces_(std::move(pieces))
{
    if (!rest_.coprime())
        throw FamilyError("p and q must be coprime");
    if (pieces_.empty())
        throw FamilyError("normal form needs at least one piece");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const NormalPiece& piece = pieces_[i];
        if (!std::isfinite(piece.gamma) || !std::isfinite(piece.A) || !std::isfinite(piece.B))
            throw FamilyError("normal form data must be finite");
        if (!(width(i) > 0.0))
            throw FamilyError("normal form break points must increase within one period");
    }
    const double defect = continuity_defect();
    if (defect > continuity_tol) {
        std::ostringstream msg;
        msg << "normal form first-order term is discontinuous (defect " << defect << ")";
        throw FamilyError(msg.str());
    }
}

double PWLNormalForm::width(std::size_t i) const
{
    const double next = i + 1 < pieces_.size() ? pieces_[i + 1].gamma : pieces_.front().gamma + 1.0;
    return next - pieces_[i].gamma;
}

double PWLNormalForm::continuity_defect() const
{
    double worst = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const NormalPiece& piece = pieces_[i];
        const NormalPiece& next = pieces_[(i + 1) % pieces_.size()];
        worst = std::max(worst, std::abs(piece.A + piece.B * width(i) - next.A));
    }
    return worst;
}

double PWLNormalForm::first_order(double x) const
{
    const double y = x - std::floor(x - pieces_.front().gamma);
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), y,
                               [](double v, const NormalPiece& piece) { return v < piece.gamma; });
    const NormalPiece& piece = it == pieces_.begin() ? pieces_.front() : *(it - 1);
    return piece.A + piece.B * (y - piece.gamma);
}

PWLNormalForm normal_form(const PWLFamily& family, Rational rest)
{
    const ValidationReport report = validate(family);
    if (!report.homeomorphic())
        throw FamilyError("PWL family is not a homeomorphism: " + report.violations.front().message);
    if (!rigid_check(family, rest))
        throw FamilyError("F^q(x,0) is not the translation x+p");

    const FixedPWL f0 = family.at(0.0);
    const std::vector<double> cuts = iterate_break_set(family, f0, rest.q, true);
    std::vector<NormalPiece> pieces;
    pieces.reserve(cuts.size());
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        const double lo = cuts[i];
        const double hi = i + 1 < cuts.size() ? cuts[i + 1] : cuts.front() + 1.0;
        const double m = 0.5 * (lo + hi);
        // position P and sensitivity S of F^r at m, with their x-slopes
        double P = m, dP = 1.0, S = 0.0, dS = 0.0;
        for (std::int64_t r = 0; r < rest.q; ++r) {
            const std::size_t k = f0.piece_of(P);
            const double y = P - std::floor(P - f0.breaks().front());
            const double s = f0.slopes()[k];
            const double ds = family.slope_derivative(k, 0.0);
            const double edge = family.values()[k].da - s * family.breaks()[k].db;
            const double offset = y - f0.breaks()[k];
            S = s * S + edge + ds * offset;
            dS = s * dS + ds * dP;
            P = f0(P);
            dP *= s;
        }
        pieces.push_back({lo, S - dS * (m - lo), dS});
    }
    return PWLNormalForm(rest, std::move(pieces));
}

std::vector<double> passage_times(const PWLNormalForm& nf)
{
    std::vector<double> times;
    times.reserve(nf.size());
    for (std::size_t i = 0; i < nf.size(); ++i) {
        const NormalPiece& piece = nf.pieces()[i];
        const double w = nf.width(i);
        if (std::abs(piece.B) <= 1e-12) {
            times.push_back(w / piece.A);
            continue;
        }
        const double z = piece.B * w / piece.A;
        if (!(1.0 + z > 0.0))
            throw EstimationError("log domain: 1 + B w / A <= 0");
        times.push_back(std::log1p(z) / piece.B);
    }
    return times;
}

double gmm_slope(const PWLNormalForm& nf)
{
    for (std::size_t i = 0; i < nf.size(); ++i) {
        const NormalPiece& piece = nf.pieces()[i];
        if (!(piece.A > 0.0 && piece.A + piece.B * nf.width(i) > 0.0))
            throw EstimationError("monotonicity violated: first-order term not positive on every piece");
    }
    double total = 0.0;
    for (double t : passage_times(nf))
        total += t;
    return 1.0 / (static_cast<double>(nf.q()) * total);
}

}  // namespace circlerot
