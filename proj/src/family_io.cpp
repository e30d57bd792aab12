#include "circlerot/family_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "circlerot/errors.hpp"

namespace circlerot {

namespace {

using nlohmann::json;

double number(const json& j, const char* key, double fallback)
{
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number())
        throw FamilyError(std::string("field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

double number(const json& j, const char* key)
{
    if (!j.contains(key))
        throw FamilyError(std::string("missing field '") + key + "'");
    return number(j, key, 0.0);
}

std::int64_t integer(const json& j, const char* key, std::int64_t fallback)
{
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number_integer())
        throw FamilyError(std::string("field '") + key + "' must be an integer");
    return j.at(key).get<std::int64_t>();
}

const json& array(const json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_array())
        throw FamilyError(std::string("field '") + key + "' must be an array");
    return j.at(key);
}

HarmonicProfile profile(const json& terms)
{
    if (!terms.is_array())
        throw FamilyError("harmonic terms must be an array");
    std::vector<Harmonic> out;
    for (const json& t : terms) {
        if (!t.is_object())
            throw FamilyError("harmonic term must be an object");
        const std::int64_t m = integer(t, "m", 0);
        out.push_back({static_cast<int>(m), number(t, "cos", 0.0), number(t, "sin", 0.0)});
    }
    std::sort(out.begin(), out.end(), [](const Harmonic& l, const Harmonic& r) { return l.m < r.m; });
    return HarmonicProfile(std::move(out));
}

AffinePath path(const json& j, const char* key, std::optional<double> default_value)
{
    if (!j.contains(key)) {
        if (default_value)
            return {*default_value, 0.0};
        throw FamilyError(std::string("missing path '") + key + "'");
    }
    const json& p = j.at(key);
    if (!p.is_object())
        throw FamilyError(std::string("path '") + key + "' must be an object {v0, d}");
    if (!p.contains("v0") && !default_value)
        throw FamilyError(std::string("path '") + key + "' needs v0");
    return {number(p, "v0", default_value.value_or(0.0)), number(p, "d", 0.0)};
}

std::optional<Rational> declared_rest(const json& j)
{
    if (!j.contains("p") && !j.contains("q"))
        return std::nullopt;
    Rational r{integer(j, "p", 0), integer(j, "q", 1)};
    if (r.q < 1)
        throw FamilyError("q must be a positive integer");
    if (!r.coprime())
        throw FamilyError("p and q must be coprime");
    return r;
}

FamilyOptions smooth_options(const json& j)
{
    FamilyOptions options;
    if (j.contains("mu_window"))
        options.window = number(j, "mu_window");
    if (j.contains("allow_non_invertible")) {
        if (!j.at("allow_non_invertible").is_boolean())
            throw FamilyError("field 'allow_non_invertible' must be a boolean");
        options.require_homeomorphism = !j.at("allow_non_invertible").get<bool>();
    }
    return options;
}

LoadedFamily build(const json& j)
{
    if (!j.is_object())
        throw FamilyError("family document must be a JSON object");
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw FamilyError("family document needs a string field 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    const std::optional<Rational> rest = declared_rest(j);

    if (kind == "generic") {
        const Rational r = rest.value_or(Rational{0, 1});
        HarmonicProfile psi = j.contains("psi") ? profile(j.at("psi")) : HarmonicProfile{};
        SecondOrderTerm g;
        if (j.contains("g")) {
            const json& gj = j.at("g");
            if (!gj.is_object())
                throw FamilyError("field 'g' must be an object {const, terms}");
            g.constant = number(gj, "const", 0.0);
            if (gj.contains("terms"))
                g.profile = profile(gj.at("terms"));
        }
        return {SmoothFamily::generic(r, number(j, "a"), std::move(psi), std::move(g), smooth_options(j)), r};
    }
    if (kind == "arnold" || kind == "modified_arnold") {
        FamilyOptions options = smooth_options(j);
        options.rest = rest;
        const AffinePath alpha = rest ? path(j, "alpha", rest->value()) : path(j, "alpha", std::nullopt);
        const AffinePath beta = path(j, "beta", 0.0);
        if (kind == "arnold")
            return {SmoothFamily::arnold(alpha, beta, options), rest};
        return {SmoothFamily::modified_arnold(alpha, beta, path(j, "gamma", 0.0), options), rest};
    }
    if (kind == "pwl") {
        const json& bj = array(j, "breaks");
        const json& vj = array(j, "values");
        std::vector<BreakPath> breaks;
        std::vector<ValuePath> values;
        for (const json& b : bj)
            breaks.push_back({number(b, "b0"), number(b, "db", 0.0)});
        for (const json& v : vj)
            values.push_back({number(v, "a0"), number(v, "da", 0.0)});
        return {PWLFamily(std::move(breaks), std::move(values), number(j, "mu_window", 1e-2)), rest};
    }
    if (kind == "pwl_nf") {
        std::vector<NormalPiece> pieces;
        for (const json& p : array(j, "pieces"))
            pieces.push_back({number(p, "gamma"), number(p, "A"), number(p, "B", 0.0)});
        const Rational r = rest.value_or(Rational{0, 1});
        return {PWLNormalForm(r, std::move(pieces)), r};
    }
    throw FamilyError("unknown family kind '" + kind + "'");
}

}  // namespace

LoadedFamily parse_family(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FamilyError(std::string("malformed family JSON: ") + e.what());
    }
    try {
        return build(j);
    } catch (const json::exception& e) {
        throw FamilyError(std::string("invalid family document: ") + e.what());
    } catch (const FamilyError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw FamilyError(std::string("invalid family document: ") + e.what());
    }
}

LoadedFamily load_family(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw FamilyError("cannot open family file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_family(buffer.str());
}

}  // namespace circlerot
