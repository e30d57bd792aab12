#pragma once

// Piecewise-linear circle lifts with break points b_k(mu) and break values
// a_k(mu), both affine in mu:
//
//   F(x, mu) = a_i(mu) + s_i(mu) (x - b_i(mu)),   b_i <= x < b_{i+1},
//   s_i = (a_{i+1} - a_i) / (b_{i+1} - b_i),      b_{N+1} = b_1 + 1, a_{N+1} = a_1 + 1.
//
// When F^q(., 0) = x + p the first-order part of F^q is piecewise linear,
// x + p + mu (A_i + B_i (x - gamma_i)), and the rotation number has slope
// 1 / (q sum_i T_i) with T_i the passage time of dX/dt = A_i + B_i (X - gamma_i)
// across [gamma_i, gamma_{i+1}].

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "circlerot/family.hpp"

namespace circlerot {

struct BreakPath {
    double b0 = 0.0;
    double db = 0.0;
    double at(double mu) const { return b0 + db * mu; }
};

struct ValuePath {
    double a0 = 0.0;
    double da = 0.0;
    double at(double mu) const { return a0 + da * mu; }
};

/// PWL lift frozen at one parameter value.
class FixedPWL {
public:
    FixedPWL(std::vector<double> breaks, std::vector<double> values);

    double operator()(double x) const;
    /// Slope of the piece containing x (right-continuous).
    double slope_at(double x) const;
    /// Index of the piece containing x reduced into [b_1, b_1 + 1).
    std::size_t piece_of(double x) const;
    double inverse(double y) const;

    const std::vector<double>& breaks() const { return breaks_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& slopes() const { return slopes_; }

private:
    std::vector<double> breaks_;
    std::vector<double> values_;
    std::vector<double> slopes_;
};

class PWLNormalForm;

class PWLFamily {
public:
    /// Checks sizes, finiteness and b_1 in [0, 1); call validate() for the
    /// homeomorphism conditions.
    PWLFamily(std::vector<BreakPath> breaks, std::vector<ValuePath> values, double window = 1e-2);

    /// The truncated q-th iterate x + p + mu (A_i + B_i (x - gamma_i)) as a
    /// PWL family with fixed breaks (one period, q = 1 lift of F^q - p + p).
    static PWLFamily from_normal_form(const PWLNormalForm& nf, double window = 1e-2);

    std::size_t size() const { return breaks_.size(); }
    const std::vector<BreakPath>& breaks() const { return breaks_; }
    const std::vector<ValuePath>& values() const { return values_; }
    double window() const { return window_; }

    FixedPWL at(double mu) const;
    double eval(double x, double mu) const { return at(mu)(x); }

    /// b_{k}, a_{k} with the wraparound convention for k = N.
    double break_at(std::size_t k, double mu) const;
    double value_at(std::size_t k, double mu) const;
    /// s_k(mu) and ds_k/dmu.
    double slope(std::size_t k, double mu) const;
    double slope_derivative(std::size_t k, double mu) const;

private:
    std::vector<BreakPath> breaks_;
    std::vector<ValuePath> values_;
    double window_;
};

struct Violation {
    enum class Clause { ordering, positivity, distinct_slopes };
    Clause clause;
    std::size_t index;
    double mu;
    std::string message;

    /// Ordering and positivity break the homeomorphism; coincident adjacent
    /// slopes only make a break point removable.
    bool fatal() const { return clause != Clause::distinct_slopes; }
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool homeomorphic() const;
};

ValidationReport validate(const PWLFamily& family, double window);
inline ValidationReport validate(const PWLFamily& family) { return validate(family, family.window()); }

/// F^q(x, 0) = x + p, checked piece by piece on the break set of F^q(., 0).
bool rigid_check(const PWLFamily& family, Rational rest, double tol = 1e-12);

struct NormalPiece {
    double gamma = 0.0;
    double A = 0.0;
    double B = 0.0;
};

/// First-order normal form of F^q.  Constructed either from a family (see
/// normal_form()) or directly from (gamma, A, B) triples; both paths check
/// ordering of gamma within one period and the continuity
/// A_i + B_i (gamma_{i+1} - gamma_i) = A_{i+1} (periodically).
class PWLNormalForm {
public:
    PWLNormalForm(Rational rest, std::vector<NormalPiece> pieces, double continuity_tol = 1e-10);

    std::int64_t p() const { return rest_.p; }
    std::int64_t q() const { return rest_.q; }
    const Rational& rest() const { return rest_; }
    const std::vector<NormalPiece>& pieces() const { return pieces_; }
    std::size_t size() const { return pieces_.size(); }
    /// gamma_{i+1} - gamma_i with gamma_{N+1} = gamma_1 + 1.
    double width(std::size_t i) const;
    /// Largest continuity defect over all pieces.
    double continuity_defect() const;
    /// A_i + B_i (x - gamma_i) on the piece containing x.
    double first_order(double x) const;

private:
    Rational rest_;
    std::vector<NormalPiece> pieces_;
};

inline constexpr double kBreakMergeTolerance = 1e-12;

/// Requires a homeomorphic family with rigid_check(family, rest) true.  Break
/// points of F^q that coincide at mu = 0 must move together; otherwise throws
/// FamilyError("duplicate break collision").
PWLNormalForm normal_form(const PWLFamily& family, Rational rest);

/// T_i = (1/B_i) log(1 + B_i w_i / A_i), or w_i / A_i when |B_i| <= 1e-12.
std::vector<double> passage_times(const PWLNormalForm& nf);
/// 1 / (q sum T_i).  Throws EstimationError("monotonicity violated") unless the
/// first-order field is positive on every piece.
double gmm_slope(const PWLNormalForm& nf);

}  // namespace circlerot
