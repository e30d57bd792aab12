#include "circlerot/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <system_error>
#include <thread>

#include "circlerot/errors.hpp"
#include "circlerot/predict.hpp"

namespace circlerot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

RotationEstimate estimate_with(const auto& lift, Rational rest, const ScanSpec& spec)
{
    switch (spec.estimator) {
    case Estimator::birkhoff:
        return birkhoff(lift, 0.0, spec.iters);
    case Estimator::power:
        return rho_of_power(lift, rest.q, 0.0, spec.iters);
    case Estimator::crossing: {
        const ReducedPowerLift G(lift, rest.p, rest.q);
        CrossingOptions options;
        options.windings = spec.windings;
        RotationEstimate est = crossing(G, options);
        const double q = static_cast<double>(rest.q);
        est.value = (static_cast<double>(rest.p) + est.value) / q;
        est.error_bound /= q;
        return est;
    }
    }
    throw std::logic_error("unknown estimator");
}

struct Moments {
    double n = 0, mx = 0, my = 0, sxx = 0, sxy = 0, syy = 0;
};

Moments centered(std::span<const double> x, std::span<const double> y)
{
    Moments m;
    m.n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        m.mx += x[i];
        m.my += y[i];
    }
    m.mx /= m.n;
    m.my /= m.n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - m.mx, dy = y[i] - m.my;
        m.sxx += dx * dx;
        m.sxy += dx * dy;
        m.syy += dy * dy;
    }
    return m;
}

void require_samples(std::span<const double> x, std::span<const double> y, std::size_t minimum)
{
    if (x.size() != y.size())
        throw std::invalid_argument("fit: x and y differ in length");
    if (x.size() < minimum)
        throw std::invalid_argument("fit: not enough samples");
}

}  // namespace

std::vector<double> mu_values(const ScanSpec& spec)
{
    if (spec.points < 2)
        throw std::invalid_argument("scan needs at least 2 points");
    if (!(spec.mu_min < spec.mu_max))
        throw std::invalid_argument("scan needs mu_min < mu_max");
    const double span = spec.mu_max - spec.mu_min;
    const double cells = static_cast<double>(spec.grid == GridKind::open ? spec.points + 1 : spec.points);
    std::vector<double> mus;
    for (std::size_t i = 1; i <= spec.points; ++i)
        mus.push_back(spec.mu_min + span * (static_cast<double>(i) / cells));
    if (spec.two_sided) {
        const std::size_t n = mus.size();
        for (std::size_t i = 0; i < n; ++i)
            mus.push_back(-mus[i]);
    }
    std::sort(mus.begin(), mus.end());
    mus.erase(std::unique(mus.begin(), mus.end()), mus.end());
    return mus;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t)
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
                body(i);
        });
}

ScanTable scan(const std::vector<double>& mus, unsigned threads,
               const std::function<RotationEstimate(double)>& estimate)
{
    ScanTable table(mus.size());
    parallel_for(mus.size(), threads, [&](std::size_t i) {
        ScanRow& row = table[i];
        row.mu = mus[i];
        try {
            const RotationEstimate est = estimate(mus[i]);
            row.rho = est.value;
            row.error_bound = est.error_bound;
        } catch (const std::exception& e) {
            row.rho = kNaN;
            row.error_bound = kNaN;
            row.error = e.what();
        }
    });
    return table;
}

ScanTable scan(const SmoothFamily& family, const ScanSpec& spec)
{
    const Rational rest = family.rest().value_or(Rational{0, 1});
    return scan(mu_values(spec), spec.threads,
                [&](double mu) { return estimate_with(family.at(mu), rest, spec); });
}

ScanTable scan(const PWLFamily& family, Rational rest, const ScanSpec& spec)
{
    return scan(mu_values(spec), spec.threads,
                [&](double mu) { return estimate_with(family.at(mu), rest, spec); });
}

SlopeFit fit_slope(std::span<const double> x, std::span<const double> y, std::optional<double> anchor)
{
    require_samples(x, y, anchor ? 1 : 2);
    SlopeFit fit;
    fit.samples = x.size();
    const double n = static_cast<double>(x.size());
    if (anchor) {
        double sxx = 0, sxy = 0, syy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = y[i] - *anchor;
            sxx += x[i] * x[i];
            sxy += x[i] * d;
            syy += d * d;
        }
        if (!(sxx > 0.0))
            throw std::invalid_argument("fit: singular design (all x zero)");
        fit.slope = sxy / sxx;
        fit.intercept = *anchor;
        double ss = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - *anchor - fit.slope * x[i];
            ss += r * r;
        }
        fit.std_error = n > 1 ? std::sqrt(ss / (n - 1.0) / sxx) : 0.0;
        fit.r_squared = syy > 0.0 ? 1.0 - ss / syy : 1.0;
        return fit;
    }
    const Moments m = centered(x, y);
    if (!(m.sxx > 0.0))
        throw std::invalid_argument("fit: singular design (all x equal)");
    fit.slope = m.sxy / m.sxx;
    fit.intercept = m.my - fit.slope * m.mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        ss += r * r;
    }
    fit.std_error = n > 2 ? std::sqrt(ss / (n - 2.0) / m.sxx) : 0.0;
    fit.r_squared = m.syy > 0.0 ? 1.0 - ss / m.syy : 1.0;
    return fit;
}

SlopeFit fit_slope(const ScanTable& table, std::optional<double> anchor)
{
    std::vector<double> x, y;
    for (const ScanRow& row : table)
        if (row.ok()) {
            x.push_back(row.mu);
            y.push_back(row.rho);
        }
    return fit_slope(x, y, anchor);
}

QuadraticFit fit_anchored_quadratic(std::span<const double> x, std::span<const double> y, double anchor)
{
    require_samples(x, y, 3);
    double scale = 0.0;
    for (double v : x)
        scale = std::max(scale, std::abs(v));
    if (!(scale > 0.0))
        throw std::invalid_argument("fit: singular design (all x zero)");
    // normal equations in t = x / scale
    double s2 = 0, s3 = 0, s4 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = x[i] / scale, d = y[i] - anchor;
        s2 += t * t;
        s3 += t * t * t;
        s4 += t * t * t * t;
        b1 += t * d;
        b2 += t * t * d;
    }
    const double det = s2 * s4 - s3 * s3;
    if (!(std::abs(det) > 1e-14 * s2 * s4))
        throw std::invalid_argument("fit: singular design for quadratic model");
    const double l = (s4 * b1 - s3 * b2) / det;
    const double k = (s2 * b2 - s3 * b1) / det;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = x[i] / scale;
        const double r = y[i] - anchor - l * t - k * t * t;
        ss += r * r;
    }
    const double sigma2 = ss / (static_cast<double>(x.size()) - 2.0);
    QuadraticFit fit;
    fit.linear = l / scale;
    fit.quadratic = k / (scale * scale);
    fit.linear_error = std::sqrt(sigma2 * s4 / det) / scale;
    fit.quadratic_error = std::sqrt(sigma2 * s2 / det) / (scale * scale);
    return fit;
}

ProportionalFit fit_proportional(std::span<const double> x, std::span<const double> y)
{
    require_samples(x, y, 1);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    if (!(sxx > 0.0))
        throw std::invalid_argument("fit: singular design (all x zero)");
    ProportionalFit fit;
    fit.coefficient = sxy / sxx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.coefficient * x[i];
        ss += r * r;
    }
    const double n = static_cast<double>(x.size());
    fit.std_error = n > 1 ? std::sqrt(ss / (n - 1.0) / sxx) : 0.0;
    fit.r_squared = syy > 0.0 ? 1.0 - ss / syy : 1.0;
    return fit;
}

SmoothFamily table_family(Rational rest, double a, double b, double c)
{
    FamilyOptions options;
    options.rest = rest;
    return SmoothFamily::modified_arnold({rest.value(), a}, {0.0, b}, {0.0, c}, options);
}

std::vector<Table1Row> table1(std::uint64_t iters, unsigned threads)
{
    struct Config {
        const char* id;
        Rational rest;
        double a, b, c;
        std::optional<double> u;
        double mu_max;
    };
    auto from_u = [](const char* id, double u) {
        return Config{id, {0, 1}, 1.0 + 0.5 * u * u, 2.0 * u, -0.5 * u * u, u, 0.01};
    };
    const std::vector<Config> configs{
        {"1", {0, 1}, 5, 4, 0, {}, 0.01},    {"2", {0, 1}, 5, 1, 0, {}, 0.01},
        {"3", {1, 2}, 5, 4, 0.5, {}, 0.01},  {"4", {1, 2}, 5, -1, 0.5, {}, 0.01},
        {"5", {1, 2}, 5, 1, 3, {}, 0.01},    from_u("6", 0.2),
        from_u("7", -0.2),                   from_u("8", 0.4),
        from_u("9", -0.4),                   {"3-fine", {1, 2}, 5, 4, 0.5, {}, 0.001},
    };

    std::vector<Table1Row> rows;
    for (const Config& cfg : configs) {
        Table1Row row;
        row.id = cfg.id;
        row.rest = cfg.rest;
        row.a = cfg.a;
        row.b = cfg.b;
        row.c = cfg.c;
        row.u = cfg.u;
        row.mu_max = cfg.mu_max;
        if (cfg.u)
            row.theoretical = closed_form(closed_forms::ModifiedU{*cfg.u});
        else if (cfg.rest.q == 1)
            row.theoretical = closed_form(closed_forms::ArnoldQ1{cfg.a, cfg.b});
        else
            row.theoretical = closed_form(closed_forms::ModifiedQ2{cfg.a, cfg.c});

        const SmoothFamily family = table_family(cfg.rest, cfg.a, cfg.b, cfg.c);
        row.predicted = require_verdict(family).slope;
        ScanSpec spec;
        spec.mu_min = 0.0;
        spec.mu_max = cfg.mu_max;
        spec.points = 20;
        spec.iters = iters;
        spec.threads = threads;
        const ScanTable table = scan(family, spec);
        row.fit = fit_slope(table);
        row.numerical = row.fit.slope;
        rows.push_back(std::move(row));
    }
    return rows;
}

Curve figure1a(std::uint64_t iters, unsigned threads, double mu_max)
{
    const SmoothFamily family = SmoothFamily::arnold({0.6615, 2.0}, {0.1, 1.0});
    ScanSpec spec;
    spec.mu_min = 0.0;
    spec.mu_max = mu_max;
    spec.points = 200;
    spec.iters = iters;
    spec.grid = GridKind::open;
    spec.threads = threads;
    Curve curve{"alpha=0.6615+2mu beta=0.1+mu", scan(family, spec), {}};
    curve.fit = fit_slope(curve.rows);
    return curve;
}

std::vector<Curve> figure1b(std::uint64_t iters, unsigned threads)
{
    FamilyOptions options;
    options.rest = Rational{2, 3};
    ScanSpec spec;
    spec.mu_min = -0.01;
    spec.mu_max = 0.01;
    spec.points = 200;
    spec.iters = iters;
    spec.grid = GridKind::open;
    spec.threads = threads;
    std::vector<Curve> curves;
    for (double v2 : {1.0, 0.1}) {
        const SmoothFamily family = SmoothFamily::arnold({2.0 / 3.0, 2.0}, {0.0, v2}, options);
        Curve curve{v2 == 1.0 ? "alpha=2/3+2mu beta=mu" : "alpha=2/3+2mu beta=0.1mu", scan(family, spec), {}};
        curve.fit = fit_slope(curve.rows);
        curves.push_back(std::move(curve));
    }
    return curves;
}

ScanTable staircase(double beta, double alpha_min, double alpha_max, std::size_t points, std::uint64_t iters,
                    unsigned threads)
{
    if (points < 2)
        throw std::invalid_argument("staircase needs at least 2 points");
    if (!(alpha_min < alpha_max))
        throw std::invalid_argument("staircase needs alpha_min < alpha_max");
    // fails early when beta is outside the invertible range
    SmoothFamily::arnold({alpha_min, 0.0}, {beta, 0.0});
    std::vector<double> alphas(points);
    for (std::size_t i = 0; i < points; ++i)
        alphas[i] = alpha_min + (alpha_max - alpha_min) * (static_cast<double>(i) / static_cast<double>(points - 1));
    return scan(alphas, threads, [&](double alpha) {
        const FixedLift lift = SmoothFamily::arnold({alpha, 0.0}, {beta, 0.0}).at(0.0);
        return birkhoff(lift, 0.0, iters);
    });
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, v);
    if (result.ec != std::errc{})
        throw std::runtime_error("number formatting failed");
    return std::string(buffer, result.ptr);
}

void write_csv(std::ostream& out, const ScanTable& table)
{
    out << "mu,rho,error_bound\n";
    for (const ScanRow& row : table)
        out << format_number(row.mu) << ',' << format_number(row.rho) << ',' << format_number(row.error_bound)
            << '\n';
}

namespace {

std::string json_number(double v)
{
    return std::isfinite(v) ? format_number(v) : "null";
}

std::string json_string(const std::string& s)
{
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\')
            out += '\\';
        if (static_cast<unsigned char>(ch) < 0x20)
            continue;
        out += ch;
    }
    return out + "\"";
}

}  // namespace

void write_json(std::ostream& out, const ScanTable& table)
{
    out << "[";
    for (std::size_t i = 0; i < table.size(); ++i) {
        const ScanRow& row = table[i];
        out << (i ? ",\n " : "\n ") << "{\"mu\":" << json_number(row.mu) << ",\"rho\":" << json_number(row.rho)
            << ",\"error_bound\":" << json_number(row.error_bound);
        if (row.error)
            out << ",\"error\":" << json_string(*row.error);
        out << "}";
    }
    out << "\n]\n";
}

void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows)
{
    out << "row_id,numerical,theoretical,abs_diff\n";
    for (const Table1Row& row : rows)
        out << row.id << ',' << format_number(row.numerical) << ',' << format_number(row.theoretical) << ','
            << format_number(std::abs(row.numerical - row.theoretical)) << '\n';
}

void write_table1_json(std::ostream& out, const std::vector<Table1Row>& rows)
{
    out << "[";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Table1Row& row = rows[i];
        out << (i ? ",\n " : "\n ") << "{\"row_id\":" << json_string(row.id) << ",\"p\":" << row.rest.p
            << ",\"q\":" << row.rest.q << ",\"a\":" << json_number(row.a) << ",\"b\":" << json_number(row.b)
            << ",\"c\":" << json_number(row.c);
        if (row.u)
            out << ",\"u\":" << json_number(*row.u);
        out << ",\"mu_max\":" << json_number(row.mu_max) << ",\"numerical\":" << json_number(row.numerical)
            << ",\"theoretical\":" << json_number(row.theoretical)
            << ",\"predicted\":" << json_number(row.predicted)
            << ",\"abs_diff\":" << json_number(std::abs(row.numerical - row.theoretical))
            << ",\"std_error\":" << json_number(row.fit.std_error) << "}";
    }
    out << "\n]\n";
}

}  // namespace circlerot
