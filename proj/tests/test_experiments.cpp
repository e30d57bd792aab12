#include <doctest.h>

#include <cmath>
#include <sstream>

#include "circlerot/experiments.hpp"
#include "circlerot/predict.hpp"
#include "support.hpp"

using namespace circlerot;

namespace {

std::string csv_of(const ScanTable& table)
{
    std::ostringstream out;
    write_csv(out, table);
    return out.str();
}

// Length of the longest run of consecutive rows whose rho equals `level` within tol.
std::size_t plateau_cells(const ScanTable& table, double level, double tol)
{
    std::size_t best = 0, run = 0;
    for (const ScanRow& row : table) {
        run = std::abs(row.rho - level) <= tol ? run + 1 : 0;
        best = std::max(best, run);
    }
    return best;
}

}  // namespace

TEST_CASE("mu grids")
{
    ScanSpec spec;
    spec.points = 4;
    spec.mu_max = 0.01;
    const std::vector<double> half = mu_values(spec);
    REQUIRE(half.size() == 4);
    CHECK(half.front() == doctest::Approx(0.0025));
    CHECK(half.back() == 0.01);

    spec.grid = GridKind::open;
    const std::vector<double> open = mu_values(spec);
    REQUIRE(open.size() == 4);
    CHECK(open.front() == doctest::Approx(0.002));
    CHECK(open.back() == doctest::Approx(0.008));

    spec.two_sided = true;
    spec.mu_min = 0.0;
    const std::vector<double> both = mu_values(spec);
    REQUIRE(both.size() == 8);
    CHECK(std::is_sorted(both.begin(), both.end()));
    CHECK(both.front() == -open.back());

    ScanSpec bad;
    bad.points = 1;
    CHECK_THROWS_AS(mu_values(bad), std::invalid_argument);
    bad.points = 5;
    bad.mu_min = 0.02;
    CHECK_THROWS_AS(mu_values(bad), std::invalid_argument);
}

TEST_CASE("rigid scan reproduces mu")
{
    const SmoothFamily rigid = SmoothFamily::generic({0, 1}, 1.0, HarmonicProfile{});
    ScanSpec spec;
    const ScanTable table = scan(rigid, spec);
    REQUIRE(table.size() == 20);
    for (const ScanRow& row : table) {
        CHECK(row.ok());
        CHECK(row.rho == row.mu);
    }
}

TEST_CASE("fit_slope")
{
    std::vector<double> x, y;
    for (int i = 1; i <= 20; ++i) {
        x.push_back(i * 0.0005);
        y.push_back(0.25 + 3.0 * x.back());
    }
    const SlopeFit exact = fit_slope(x, y);
    CHECK(std::abs(exact.slope - 3.0) <= 1e-12);
    CHECK(exact.std_error <= 1e-14);
    CHECK(exact.r_squared == doctest::Approx(1.0));
    CHECK(exact.samples == 20);
    const SlopeFit anchored = fit_slope(x, y, 0.25);
    CHECK(std::abs(anchored.slope - 3.0) <= 1e-12);
    CHECK(anchored.intercept == 0.25);

    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = 3.0 * x[i] + 0.001 * x[i] * x[i];
    const SlopeFit contaminated = fit_slope(x, y, 0.0);
    CHECK(contaminated.slope >= 3.0);
    CHECK(contaminated.slope <= 3.01);

    const std::vector<double> same(5, 0.1), values{1, 2, 3, 4, 5};
    CHECK_THROWS_AS(fit_slope(same, values), std::invalid_argument);
    CHECK_THROWS_AS(fit_slope(std::vector<double>{0.1}, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("quadratic and proportional fits")
{
    std::vector<double> x, y, z;
    for (double mu : {1e-2, 5e-3, 2e-3, 1e-3, -1e-3, -4e-3}) {
        x.push_back(mu);
        y.push_back(0.5 + 2.0 * mu - 7.0 * mu * mu);
        z.push_back(-4.0 * mu * mu);
    }
    const QuadraticFit q = fit_anchored_quadratic(x, y, 0.5);
    CHECK(q.linear == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(q.quadratic == doctest::Approx(-7.0).epsilon(1e-6));

    std::vector<double> x2;
    for (double mu : x)
        x2.push_back(mu * mu);
    const ProportionalFit p = fit_proportional(x2, z);
    CHECK(p.coefficient == doctest::Approx(-4.0));
    CHECK(p.r_squared == doctest::Approx(1.0));
}

TEST_CASE("property: scans are deterministic across thread counts")
{
    const SmoothFamily family = SmoothFamily::arnold({2.0 / 3.0, 2.0}, {0.1, 1.0});
    ScanSpec spec;
    spec.mu_max = 3e-4;
    spec.iters = 20000;
    spec.threads = 1;
    const std::string one = csv_of(scan(family, spec));
    spec.threads = 4;
    const std::string four = csv_of(scan(family, spec));
    CHECK(one == four);
    CHECK(one.rfind("mu,rho,error_bound\n", 0) == 0);
    CHECK(one == csv_of(scan(family, spec)));
}

TEST_CASE("property: scans of monotone families are non-decreasing")
{
    testsupport::Rng rng(71);
    for (int trial = 0; trial < 5; ++trial) {
        const SmoothFamily family = testsupport::random_transversal(rng, 3, 4);
        for (Estimator estimator : {Estimator::birkhoff, Estimator::crossing}) {
            ScanSpec spec;
            spec.iters = 20000;
            spec.estimator = estimator;
            spec.two_sided = true;
            spec.mu_max = 1e-3;
            spec.points = 10;
            const ScanTable table = scan(family, spec);
            for (std::size_t i = 1; i < table.size(); ++i) {
                REQUIRE(table[i].ok());
                CHECK(table[i].rho - table[i - 1].rho >= -2.0 * (table[i].error_bound + table[i - 1].error_bound));
            }
        }
    }
}

TEST_CASE("scan records estimator failures per row")
{
    const ScanTable table = scan({0.1, 0.2, 0.3}, 2, [](double mu) -> RotationEstimate {
        if (mu > 0.15 && mu < 0.25)
            throw std::runtime_error("boom");
        return {mu, 0.0, 1, RotationMethod::birkhoff};
    });
    REQUIRE(table.size() == 3);
    CHECK(table[0].ok());
    CHECK_FALSE(table[1].ok());
    CHECK(std::isnan(table[1].rho));
    CHECK(table[1].error->find("boom") != std::string::npos);
    CHECK(table[2].rho == 0.3);
    CHECK(fit_slope(table).samples == 2);
}

TEST_CASE("PWL scans")
{
    const PWLFamily tent({{0.0, 0.0}, {0.5, 0.0}}, {{0.0, 1.0}, {0.5, 2.0}});
    ScanSpec spec;
    spec.mu_max = 1e-3;
    spec.points = 5;
    spec.estimator = Estimator::crossing;
    spec.windings = 5;
    spec.two_sided = true;
    const ScanTable table = scan(tent, {0, 1}, spec);
    REQUIRE(table.size() == 10);
    CHECK(std::abs(fit_slope(table, 0.0).slope - 1.0 / std::log(2.0)) <= 2e-3);
    spec.mu_max = 0.5;
    const ScanTable outside = scan(tent, {0, 1}, spec);
    CHECK_FALSE(outside.front().ok());
    CHECK(outside.front().error->find("window") != std::string::npos);
}

TEST_CASE("staircase")
{
    const ScanTable rigid = staircase(0.0, 0.0, 1.0, 11, 1000, 1);
    REQUIRE(rigid.size() == 11);
    CHECK(rigid.front().mu == 0.0);
    CHECK(rigid.back().mu == 1.0);
    for (const ScanRow& row : rigid)
        CHECK(std::abs(row.rho - row.mu) <= 1e-12);

    const ScanTable window = staircase(0.1, 0.6615, 0.6675, 61, 100000, 0);
    CHECK(std::abs(window.front().rho - 2.0 / 3.0) <= 1e-4);
    CHECK(plateau_cells(window, 2.0 / 3.0, 1e-4) >= 4);
    CHECK(window.back().rho > 2.0 / 3.0 + 5e-4);

    const ScanTable coarse = staircase(0.15, 0.0, 1.0, 101, 20000, 0);
    for (double level : {0.0, 0.5, 1.0})
        CHECK(plateau_cells(coarse, level, 1e-3) > 3);
    for (std::size_t i = 1; i < coarse.size(); ++i)
        CHECK(coarse[i].rho - coarse[i - 1].rho >= -2.0 * (coarse[i].error_bound + coarse[i - 1].error_bound));

    CHECK_THROWS_AS(staircase(0.2, 0.0, 1.0, 11), FamilyError);
}

TEST_CASE("figure1a path: plateau, then the exit of the 2/3 tongue")
{
    // the printed window stays inside the tongue
    const Curve inside = figure1a(100000, 0);
    REQUIRE(inside.rows.size() == 200);
    for (const ScanRow& row : inside.rows)
        CHECK(std::abs(row.rho - 2.0 / 3.0) <= 2.0 * row.error_bound);

    const Curve curve = figure1a(100000, 0, 0.003);
    REQUIRE(curve.rows.size() == 200);
    for (std::size_t i = 0; i < 20; ++i)
        CHECK(std::abs(curve.rows[i].rho - 2.0 / 3.0) <= 2.0 * curve.rows[i].error_bound);
    CHECK(curve.rows.back().rho > 2.0 / 3.0 + 5e-3);
    for (std::size_t i = 1; i < curve.rows.size(); ++i)
        CHECK(curve.rows[i].rho - curve.rows[i - 1].rho >=
              -2.0 * (curve.rows[i].error_bound + curve.rows[i - 1].error_bound));
    // square-root onset: steep just after the edge, flatter later
    const std::size_t edge = static_cast<std::size_t>(
        std::find_if(curve.rows.begin(), curve.rows.end(),
                     [](const ScanRow& r) { return r.rho > 2.0 / 3.0 + 1e-4; }) -
        curve.rows.begin());
    REQUIRE(edge + 20 < curve.rows.size());
    const double early = curve.rows[edge + 10].rho - curve.rows[edge].rho;
    const double late = curve.rows.back().rho - curve.rows[curve.rows.size() - 11].rho;
    CHECK(early > 2.0 * late);
}

TEST_CASE("table rows use the closed forms")
{
    const std::vector<Table1Row> rows = table1(20000, 0);
    REQUIRE(rows.size() == 10);
    CHECK(rows.back().id == "3-fine");
    for (const Table1Row& row : rows) {
        CHECK(std::abs(row.predicted - row.theoretical) <= 1e-10);
        CHECK(std::isfinite(row.numerical));
    }
    CHECK(rows[0].theoretical == doctest::Approx(3.0));
    CHECK(rows[3].theoretical == doctest::Approx(std::sqrt(24.75)));
    CHECK(rows[8].theoretical == doctest::Approx(std::pow(0.84, 1.5)));

    std::ostringstream csv;
    write_table1_csv(csv, rows);
    CHECK(csv.str().rfind("row_id,numerical,theoretical,abs_diff\n", 0) == 0);
}

TEST_CASE("format_number round-trips")
{
    for (double v : {0.1, 2.0 / 3.0, 1e-300, -4.898979485566356})
        CHECK(std::stod(format_number(v)) == v);
    CHECK(format_number(3.0) == "3");
}
