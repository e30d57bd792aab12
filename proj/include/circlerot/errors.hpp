#pragma once

#include <stdexcept>
#include <string>

namespace circlerot {

/// A family (smooth or piecewise linear) failed validation: bad parameters,
/// not a homeomorphism on the requested window, not rigid where required.
class FamilyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The requested parameter lies outside the family's homeomorphism window.
class WindowError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical procedure could not produce a result under its preconditions
/// (no forward progress, iteration cap, vanishing velocity, ...).
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace circlerot
