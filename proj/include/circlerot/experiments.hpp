#pragma once

// Parameter scans, regression fits and the canned experiments exposed by the
// command-line tool.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "circlerot/family.hpp"
#include "circlerot/pwl.hpp"
#include "circlerot/rotation.hpp"

namespace circlerot {

enum class GridKind {
    /// mu_i = mu_min + i (mu_max - mu_min) / points, i = 1..points: (min, max].
    half_open,
    /// points interior nodes of (min, max).
    open,
};

enum class Estimator {
    /// Birkhoff average of F over `iters` steps.
    birkhoff,
    /// Birkhoff average of F^q over `iters` steps, divided by q.
    power,
    /// Crossing bracket of F^q - p with `windings` windings.
    crossing,
};

struct ScanSpec {
    double mu_min = 0.0;
    double mu_max = 0.01;
    std::size_t points = 20;
    std::uint64_t iters = kDefaultIterations;
    /// Adds the mirror image -mu of every grid point.
    bool two_sided = false;
    GridKind grid = GridKind::half_open;
    Estimator estimator = Estimator::birkhoff;
    std::uint64_t windings = 1;
    /// Worker threads; 0 uses the hardware concurrency.
    unsigned threads = 0;
};

/// Sorted parameter values of a scan.  Throws std::invalid_argument unless
/// points >= 2 and mu_min < mu_max.
std::vector<double> mu_values(const ScanSpec& spec);

struct ScanRow {
    double mu = 0.0;
    double rho = 0.0;
    double error_bound = 0.0;
    /// Set when the estimator failed on this row; rho and error_bound are NaN.
    std::optional<std::string> error;

    bool ok() const { return !error.has_value(); }
};

using ScanTable = std::vector<ScanRow>;

/// Runs body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

/// Rows in increasing mu; estimator failures are recorded per row.
ScanTable scan(const SmoothFamily& family, const ScanSpec& spec);
ScanTable scan(const PWLFamily& family, Rational rest, const ScanSpec& spec);
/// Scan of an arbitrary lift-valued map mu -> estimate.
ScanTable scan(const std::vector<double>& mus, unsigned threads,
               const std::function<RotationEstimate(double)>& estimate);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double std_error = 0.0;
    double r_squared = 0.0;
    std::size_t samples = 0;
};

/// Ordinary least squares y = intercept + slope x.  With `anchor`, the
/// intercept is fixed to that value and only the slope is fitted.
/// Throws std::invalid_argument when fewer than 2 samples or all x equal.
SlopeFit fit_slope(std::span<const double> x, std::span<const double> y, std::optional<double> anchor = {});
/// Fit of rho against mu over the rows that succeeded.
SlopeFit fit_slope(const ScanTable& table, std::optional<double> anchor = {});

struct QuadraticFit {
    double linear = 0.0;
    double quadratic = 0.0;
    double linear_error = 0.0;
    double quadratic_error = 0.0;
};

/// y - anchor = linear x + quadratic x^2 by least squares.
QuadraticFit fit_anchored_quadratic(std::span<const double> x, std::span<const double> y, double anchor);

struct ProportionalFit {
    double coefficient = 0.0;
    double std_error = 0.0;
    /// 1 - SS_res / sum y^2 (the model has no intercept).
    double r_squared = 0.0;
};

/// y = coefficient x.
ProportionalFit fit_proportional(std::span<const double> x, std::span<const double> y);

struct Table1Row {
    std::string id;
    Rational rest;
    double a = 0.0, b = 0.0, c = 0.0;
    std::optional<double> u;
    /// Interval (0, mu_max] of the 20-point scan.
    double mu_max = 0.01;
    double theoretical = 0.0;
    double predicted = 0.0;
    double numerical = 0.0;
    SlopeFit fit;
};

/// Modified Arnold family x + p/q + a mu + b mu sin(2 pi x) + c mu cos(4 pi x).
SmoothFamily table_family(Rational rest, double a, double b, double c);

/// The nine slope experiments on modified Arnold paths, followed by the
/// (1,2), (5,4,0.5) row repeated on (0, 0.001].
std::vector<Table1Row> table1(std::uint64_t iters = kDefaultIterations, unsigned threads = 0);

struct Curve {
    std::string label;
    ScanTable rows;
    SlopeFit fit;
};

/// Arnold path (0.6615 + 2 mu, 0.1 + mu), 200 points in (0, mu_max).  The
/// 2/3 tongue ends near mu = 4.7e-4 on this path, so the default window shows
/// only the plateau; mu_max = 0.003 also shows the exit.
Curve figure1a(std::uint64_t iters = kDefaultIterations, unsigned threads = 0, double mu_max = 0.0003);
/// Arnold paths (2/3 + 2 mu, mu) and (2/3 + 2 mu, 0.1 mu), 200 points in (-0.01, 0.01).
std::vector<Curve> figure1b(std::uint64_t iters = kDefaultIterations, unsigned threads = 0);

/// Rotation number of x + alpha + beta sin(2 pi x) over alpha in [alpha_min, alpha_max]
/// (points nodes including both ends); the mu column holds alpha.
ScanTable staircase(double beta, double alpha_min, double alpha_max, std::size_t points,
                    std::uint64_t iters = kDefaultIterations, unsigned threads = 0);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

void write_csv(std::ostream& out, const ScanTable& table);
void write_json(std::ostream& out, const ScanTable& table);
void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows);
void write_table1_json(std::ostream& out, const std::vector<Table1Row>& rows);

}  // namespace circlerot
