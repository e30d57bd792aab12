#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "circlerot/errors.hpp"
#include "circlerot/experiments.hpp"
#include "circlerot/family_io.hpp"
#include "circlerot/predict.hpp"

using namespace circlerot;
using nlohmann::ordered_json;

namespace {

struct Common {
    std::string family;
    double mu = 0.0;
    double mu_min = 0.0;
    double mu_max = 0.01;
    std::size_t points = 20;
    std::uint64_t iters = kDefaultIterations;
    bool two_sided = false;
    std::string out;
    std::string format = "csv";
    std::string estimator = "birkhoff";
    std::string grid = "half_open";
    std::uint64_t windings = 1;
    unsigned threads = 0;
    double beta = 0.1;
    double alpha_min = 0.0;
    double alpha_max = 1.0;
    int curve = 1;
    double figure_mu_max = 0.0003;
    double tolerance = 1e-9;
    std::optional<double> anchor;
    std::optional<double> measure;
};

class Output {
public:
    explicit Output(const std::string& path)
    {
        if (!path.empty()) {
            file_.open(path);
            if (!file_)
                throw std::runtime_error("cannot open output file " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};


ordered_json fit_json(const SlopeFit& fit)
{
    return {{"slope", fit.slope},
            {"intercept", fit.intercept},
            {"std_error", fit.std_error},
            {"r_squared", fit.r_squared},
            {"samples", fit.samples}};
}

void write_fit_csv(std::ostream& out, const SlopeFit& fit)
{
    out << "slope,intercept,std_error,r_squared\n"
        << format_number(fit.slope) << ',' << format_number(fit.intercept) << ',' << format_number(fit.std_error)
        << ',' << format_number(fit.r_squared) << '\n';
}

ScanSpec scan_spec(const Common& c)
{
    static const std::map<std::string, Estimator> estimators{
        {"birkhoff", Estimator::birkhoff}, {"power", Estimator::power}, {"crossing", Estimator::crossing}};
    ScanSpec spec;
    spec.mu_min = c.mu_min;
    spec.mu_max = c.mu_max;
    spec.points = c.points;
    spec.iters = c.iters;
    spec.two_sided = c.two_sided;
    spec.grid = c.grid == "open" ? GridKind::open : GridKind::half_open;
    spec.estimator = estimators.at(c.estimator);
    spec.windings = c.windings;
    spec.threads = c.threads;
    return spec;
}

ScanTable run_scan(const Common& c, const ScanSpec& spec)
{
    const LoadedFamily loaded = load_family(c.family);
    if (const auto* smooth = std::get_if<SmoothFamily>(&loaded.family))
        return scan(*smooth, spec);
    if (const auto* pwl = std::get_if<PWLFamily>(&loaded.family))
        return scan(*pwl, loaded.rest.value_or(Rational{0, 1}), spec);
    throw FamilyError("a normal form has no rotation number to scan; use pwl-slope");
}

void emit_table(const Common& c, const ScanTable& table)
{
    Output out(c.out);
    if (c.format == "json")
        write_json(out.stream(), table);
    else
        write_csv(out.stream(), table);
}

int cmd_rho(const Common& c)
{
    ScanSpec spec = scan_spec(c);
    const LoadedFamily loaded = load_family(c.family);
    const Rational rest = loaded.rest.value_or(Rational{0, 1});
    ScanTable table;
    if (const auto* smooth = std::get_if<SmoothFamily>(&loaded.family)) {
        const Rational r = smooth->rest().value_or(rest);
        table = scan({c.mu}, 1, [&](double mu) {
            const FixedLift lift = smooth->at(mu);
            switch (spec.estimator) {
            case Estimator::power:
                return rho_of_power(lift, r.q, 0.0, spec.iters);
            case Estimator::crossing: {
                CrossingOptions options;
                options.windings = spec.windings;
                RotationEstimate est = crossing(ReducedPowerLift(lift, r.p, r.q), options);
                est.value = (static_cast<double>(r.p) + est.value) / static_cast<double>(r.q);
                est.error_bound /= static_cast<double>(r.q);
                return est;
            }
            default:
                return birkhoff(lift, 0.0, spec.iters);
            }
        });
    } else if (const auto* pwl = std::get_if<PWLFamily>(&loaded.family)) {
        table = scan({c.mu}, 1, [&](double mu) { return birkhoff(pwl->at(mu), 0.0, spec.iters); });
    } else {
        throw FamilyError("a normal form has no rotation number; use pwl-slope");
    }
    if (table.front().error)
        throw EstimationError(*table.front().error);
    emit_table(c, table);
    return 0;
}

int cmd_scan(const Common& c)
{
    emit_table(c, run_scan(c, scan_spec(c)));
    return 0;
}

int cmd_slope(const Common& c)
{
    const ScanTable table = run_scan(c, scan_spec(c));
    const SlopeFit fit = fit_slope(table, c.anchor);
    Output out(c.out);
    if (c.format == "json")
        out.stream() << fit_json(fit).dump(2) << '\n';
    else
        write_fit_csv(out.stream(), fit);
    return 0;
}

int cmd_predict(const Common& c)
{
    const LoadedFamily loaded = load_family(c.family);
    const auto* family = std::get_if<SmoothFamily>(&loaded.family);
    if (!family)
        throw FamilyError("predict needs a smooth family; use pwl-slope for piecewise-linear ones");
    PredictOptions options;
    options.tolerance = c.tolerance;
    const SlopeReport report = classify_and_predict(*family, options);
    ordered_json j{{"classification", to_string(report.classification)},
                   {"T0", report.T0 ? ordered_json(*report.T0) : ordered_json(nullptr)},
                   {"slope", report.slope},
                   {"min_a_psi", report.min_a_psi},
                   {"max_a_psi", report.max_a_psi},
                   {"quadrature_error", report.quadrature_error},
                   {"reflected", report.reflected},
                   {"brunovsky_slope", brunovsky_slope(*family)}};
    Output out(c.out);
    if (c.format == "json") {
        out.stream() << j.dump(2) << '\n';
    } else {
        out.stream() << "classification,T0,slope,min_a_psi,max_a_psi,quadrature_error\n"
                     << to_string(report.classification) << ','
                     << (report.T0 ? format_number(*report.T0) : std::string("")) << ','
                     << format_number(report.slope) << ',' << format_number(report.min_a_psi) << ','
                     << format_number(report.max_a_psi) << ',' << format_number(report.quadrature_error) << '\n';
    }
    if (report.classification == Transversality::indeterminate) {
        std::cerr << "indeterminate transversality: min(a+Psi) within tolerance of 0\n";
        return 3;
    }
    return 0;
}

int cmd_table1(const Common& c)
{
    const std::vector<Table1Row> rows = table1(c.iters, c.threads);
    Output out(c.out);
    if (c.format == "json")
        write_table1_json(out.stream(), rows);
    else
        write_table1_csv(out.stream(), rows);
    return 0;
}

int cmd_figure1a(const Common& c)
{
    emit_table(c, figure1a(c.iters, c.threads, c.figure_mu_max).rows);
    return 0;
}

int cmd_figure1b(const Common& c)
{
    const std::vector<Curve> curves = figure1b(c.iters, c.threads);
    if (c.format == "json") {
        ordered_json j = ordered_json::array();
        for (const Curve& curve : curves) {
            ordered_json rows = ordered_json::array();
            for (const ScanRow& row : curve.rows)
                rows.push_back({{"mu", row.mu}, {"rho", row.rho}, {"error_bound", row.error_bound}});
            j.push_back({{"label", curve.label}, {"fit", fit_json(curve.fit)}, {"rows", rows}});
        }
        Output out(c.out);
        out.stream() << j.dump(2) << '\n';
        return 0;
    }
    if (c.curve < 1 || c.curve > static_cast<int>(curves.size()))
        throw std::invalid_argument("--curve must be 1 or 2");
    for (const Curve& curve : curves)
        std::cerr << curve.label << ": slope " << format_number(curve.fit.slope) << " +- "
                  << format_number(curve.fit.std_error) << '\n';
    Output out(c.out);
    write_csv(out.stream(), curves[static_cast<std::size_t>(c.curve - 1)].rows);
    return 0;
}

int cmd_staircase(const Common& c)
{
    emit_table(c, staircase(c.beta, c.alpha_min, c.alpha_max, c.points, c.iters, c.threads));
    return 0;
}

int cmd_pwl_slope(const Common& c)
{
    const LoadedFamily loaded = load_family(c.family);
    std::optional<PWLNormalForm> nf;
    if (const auto* given = std::get_if<PWLNormalForm>(&loaded.family)) {
        nf = *given;
    } else if (const auto* pwl = std::get_if<PWLFamily>(&loaded.family)) {
        if (!loaded.rest)
            throw FamilyError("pwl-slope needs p and q in the family document");
        nf = normal_form(*pwl, *loaded.rest);
    } else {
        throw FamilyError("pwl-slope needs a pwl or pwl_nf family");
    }
    const double slope = gmm_slope(*nf);
    const std::vector<double> times = passage_times(*nf);
    ordered_json j{{"p", nf->p()}, {"q", nf->q()}, {"slope", slope}};
    ordered_json pieces = ordered_json::array();
    for (std::size_t i = 0; i < nf->size(); ++i) {
        const NormalPiece& piece = nf->pieces()[i];
        pieces.push_back({{"gamma", piece.gamma}, {"A", piece.A}, {"B", piece.B}, {"T", times[i]}});
    }
    j["pieces"] = pieces;
    if (c.measure) {
        const auto* pwl = std::get_if<PWLFamily>(&loaded.family);
        const PWLFamily realized = pwl ? *pwl : PWLFamily::from_normal_form(*nf);
        const Rational rest = pwl ? *loaded.rest : Rational{nf->p(), 1};
        const double h = *c.measure;
        CrossingOptions options;
        options.windings = c.windings;
        auto rho = [&](double mu) {
            const FixedPWL lift = realized.at(mu);
            return crossing(ReducedPowerLift(lift, rest.p, rest.q), options).value / static_cast<double>(rest.q);
        };
        double measured = (rho(h) - rho(-h)) / (2.0 * h);
        if (!pwl)
            measured /= static_cast<double>(nf->q());
        j["measured_slope"] = measured;
    }
    Output out(c.out);
    if (c.format == "json") {
        out.stream() << j.dump(2) << '\n';
    } else {
        out.stream() << "gamma,A,B,T\n";
        for (std::size_t i = 0; i < nf->size(); ++i) {
            const NormalPiece& piece = nf->pieces()[i];
            out.stream() << format_number(piece.gamma) << ',' << format_number(piece.A) << ','
                         << format_number(piece.B) << ',' << format_number(times[i]) << '\n';
        }
        out.stream() << "slope," << format_number(slope);
        if (j.contains("measured_slope"))
            out.stream() << "\nmeasured_slope," << format_number(j["measured_slope"].get<double>());
        out.stream() << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Rotation numbers of circle-map families near rational rotations"};
    app.require_subcommand(1);
    Common c;

    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--out", c.out, "Output file (default stdout)");
        sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", c.threads, "Worker threads (0 = hardware)");
    };
    auto add_estimator = [&](CLI::App* sub) {
        sub->add_option("--iters", c.iters, "Iterations per estimate")->check(CLI::PositiveNumber);
        sub->add_option("--estimator", c.estimator, "birkhoff, power or crossing")
            ->check(CLI::IsMember({"birkhoff", "power", "crossing"}));
        sub->add_option("--windings", c.windings, "Windings for the crossing estimator")
            ->check(CLI::PositiveNumber);
    };
    auto add_scan = [&](CLI::App* sub) {
        sub->add_option("--family", c.family, "Family JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--mu-min", c.mu_min, "Lower end of the mu interval");
        sub->add_option("--mu-max", c.mu_max, "Upper end of the mu interval");
        sub->add_option("--points", c.points, "Number of mu values");
        sub->add_flag("--two-sided", c.two_sided, "Mirror the grid to negative mu");
        sub->add_option("--grid", c.grid, "half_open (min, max] or open (min, max)")
            ->check(CLI::IsMember({"half_open", "open"}));
        add_estimator(sub);
        add_output(sub);
    };

    auto* rho = app.add_subcommand("rho", "Rotation number at one parameter value");
    rho->add_option("--family", c.family, "Family JSON file")->required()->check(CLI::ExistingFile);
    rho->add_option("--mu", c.mu, "Parameter value");
    add_estimator(rho);
    add_output(rho);

    auto* scan_cmd = app.add_subcommand("scan", "Rotation numbers over a mu grid");
    add_scan(scan_cmd);

    auto* slope = app.add_subcommand("slope", "Least-squares slope of a scan");
    add_scan(slope);
    slope->add_option("--anchor", c.anchor, "Fix the intercept (e.g. p/q)");

    auto* predict = app.add_subcommand("predict", "Transversality verdict and predicted slope");
    predict->add_option("--family", c.family, "Family JSON file")->required()->check(CLI::ExistingFile);
    predict->add_option("--tolerance", c.tolerance, "Transversality tolerance");
    add_output(predict);

    auto* t1 = app.add_subcommand("table1", "Slope experiments on modified Arnold paths");
    t1->add_option("--iters", c.iters, "Iterations per estimate")->check(CLI::PositiveNumber);
    add_output(t1);

    auto* f1a = app.add_subcommand("figure1a", "Arnold tongue exit scan");
    f1a->add_option("--iters", c.iters, "Iterations per estimate")->check(CLI::PositiveNumber);
    f1a->add_option("--mu-max", c.figure_mu_max, "Upper end of the mu window")->check(CLI::PositiveNumber);
    add_output(f1a);

    auto* f1b = app.add_subcommand("figure1b", "Two Arnold paths through (2/3, 0)");
    f1b->add_option("--iters", c.iters, "Iterations per estimate")->check(CLI::PositiveNumber);
    f1b->add_option("--curve", c.curve, "Curve written as CSV: 1 (beta=mu) or 2 (beta=0.1mu)");
    add_output(f1b);

    auto* stair = app.add_subcommand("staircase", "Rotation number against alpha at fixed beta");
    stair->add_option("--beta", c.beta, "Fixed beta");
    stair->add_option("--alpha-min", c.alpha_min, "First alpha");
    stair->add_option("--alpha-max", c.alpha_max, "Last alpha");
    stair->add_option("--points", c.points, "Number of alpha values");
    stair->add_option("--iters", c.iters, "Iterations per estimate")->check(CLI::PositiveNumber);
    add_output(stair);

    auto* pwl = app.add_subcommand("pwl-slope", "Normal form and slope of a piecewise-linear family");
    pwl->add_option("--family", c.family, "Family JSON file (pwl or pwl_nf)")->required()->check(CLI::ExistingFile);
    pwl->add_option("--measure", c.measure, "Also measure the slope by central differences at +-mu");
    pwl->add_option("--windings", c.windings, "Windings for the measured slope")->check(CLI::PositiveNumber);
    add_output(pwl);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*rho)
            return cmd_rho(c);
        if (*scan_cmd)
            return cmd_scan(c);
        if (*slope)
            return cmd_slope(c);
        if (*predict)
            return cmd_predict(c);
        if (*t1)
            return cmd_table1(c);
        if (*f1a)
            return cmd_figure1a(c);
        if (*f1b)
            return cmd_figure1b(c);
        if (*stair)
            return cmd_staircase(c);
        if (*pwl)
            return cmd_pwl_slope(c);
    } catch (const FamilyError& e) {
        std::cerr << "family error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
