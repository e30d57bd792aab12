#pragma once

// JSON family documents.
//
//   {"kind": "generic", "p": 0, "q": 1, "a": 5,
//    "psi": [{"m": 1, "cos": 0, "sin": 4}],
//    "g": {"const": 0, "terms": [{"m": 2, "cos": 1, "sin": 0}]},
//    "mu_window": 0.05, "allow_non_invertible": false}
//
//   {"kind": "arnold", "p": 2, "q": 3,
//    "alpha": {"v0": 0.6667, "d": 2}, "beta": {"v0": 0, "d": 1}}
//   {"kind": "modified_arnold", ..., "gamma": {"v0": 0, "d": 0.5}}
//
//   {"kind": "pwl", "p": 0, "q": 1, "mu_window": 0.01,
//    "breaks": [{"b0": 0, "db": 0}], "values": [{"a0": 0, "da": 1}]}
//   {"kind": "pwl_nf", "p": 0, "q": 1, "pieces": [{"gamma": 0, "A": 1, "B": 0}]}
//
// For Arnold kinds alpha.v0 defaults to p/q; giving p and q declares the
// family rigid at that rotation.  All malformed input raises FamilyError.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "circlerot/family.hpp"
#include "circlerot/pwl.hpp"

namespace circlerot {

struct LoadedFamily {
    std::variant<SmoothFamily, PWLFamily, PWLNormalForm> family;
    /// p/q when the document declares it.
    std::optional<Rational> rest;

    bool is_smooth() const { return std::holds_alternative<SmoothFamily>(family); }
    bool is_pwl() const { return std::holds_alternative<PWLFamily>(family); }
    bool is_normal_form() const { return std::holds_alternative<PWLNormalForm>(family); }
};

LoadedFamily parse_family(std::string_view text);
LoadedFamily load_family(const std::filesystem::path& path);

}  // namespace circlerot
