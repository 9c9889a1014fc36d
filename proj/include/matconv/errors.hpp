#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace matconv {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

struct NonFinite : Error {
    explicit NonFinite(const std::string& what) : Error(what) {}
};

/// A matrix required to be positive semidefinite is not; carries the
/// maximally violating unit vector and the offending eigenvalue.
struct NotPsd : Error {
    std::vector<double> witness;
    double min_eigenvalue;

    NotPsd(const std::string& what, std::vector<double> w, double min_eig)
        : Error(what), witness(std::move(w)), min_eigenvalue(min_eig) {}
};

struct NegativeScale : Error {
    explicit NegativeScale(const std::string& what) : Error(what) {}
};

struct ZeroDirection : Error {
    explicit ZeroDirection(const std::string& what) : Error(what) {}
};

struct NotUnivariate : Error {
    explicit NotUnivariate(const std::string& what) : Error(what) {}
};

/// One-sided derivatives disagree along the named coordinate (1-based).
struct NotDifferentiable : Error {
    int coordinate;

    NotDifferentiable(const std::string& what, int coord)
        : Error(what), coordinate(coord) {}
};

struct NoSmoothSamples : Error {
    explicit NoSmoothSamples(const std::string& what) : Error(what) {}
};

/// An operation's precondition failed; the message lists every violated
/// condition.
struct PreconditionViolated : Error {
    explicit PreconditionViolated(const std::string& what) : Error(what) {}
};

struct UnknownExample : Error {
    explicit UnknownExample(const std::string& what) : Error(what) {}
};

struct BudgetZero : Error {
    explicit BudgetZero(const std::string& what) : Error(what) {}
};

/// Malformed function-spec or candidate document; `path` names the
/// offending location, e.g. "root.terms[1].matrix[0]".
struct ParseError : Error {
    std::string path;

    ParseError(const std::string& what, std::string p)
        : Error(what + " (at " + p + ")"), path(std::move(p)) {}
};

}  // namespace matconv
