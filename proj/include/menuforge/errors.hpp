#ifndef MENUFORGE_ERRORS_HPP
#define MENUFORGE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace menuforge {

// Root of the library's exception hierarchy.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed values at construction time (probabilities off the simplex,
// duplicate labels, non-finite payments, ...).
struct ValidationError : Error {
    using Error::Error;
};

// Two containers that must line up do not. Carries both sizes.
struct DimensionError : Error {
    std::size_t expected;
    std::size_t actual;
    DimensionError(const std::string& what_arg, std::size_t expected_size, std::size_t actual_size)
        : Error(what_arg + " (expected " + std::to_string(expected_size) + ", got " +
                std::to_string(actual_size) + ")"),
          expected(expected_size),
          actual(actual_size) {}
};

// A documented precondition of an operation does not hold.
struct PreconditionError : Error {
    using Error::Error;
};

// Belief outside the convex hull of the action beliefs; the cost curve is
// undefined there.
struct HullError : Error {
    using Error::Error;
};

// The target action is not (strictly) elicitable, so no incentive-compatible
// contract exists for it.
struct NotElicitableError : Error {
    using Error::Error;
};

}  // namespace menuforge

#endif
