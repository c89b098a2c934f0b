#pragma once

#include <stdexcept>
#include <string>

namespace pensolve {

/// Raised when the structural market hypothesis (b > 0, a > b, Δμ > 0) fails
/// and an operation whose guarantees depend on it is requested.
class StructuralHypothesisError : public std::runtime_error {
public:
    explicit StructuralHypothesisError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Raised when a ψ value fed to the policy formula is not strictly positive.
class InvalidPsiError : public std::runtime_error {
public:
    explicit InvalidPsiError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Raised on numerical failure (quadrature non-convergence, rejected time
/// steps past the retry budget, ...). Carries the achieved tolerance or a
/// diagnostic in the message.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what)
        : std::runtime_error(what) {}
};

} // namespace pensolve
