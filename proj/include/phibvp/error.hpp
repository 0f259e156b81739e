#pragma once

#include <stdexcept>
#include <string>

namespace phibvp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed numeric input: non-finite values, bad mesh, bad parameters.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Two grid functions that should share a mesh do not.
class MeshMismatch : public Error {
public:
    using Error::Error;
};

/// A point lies outside the domain of an operator or function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// No strictly monotone neighbourhood was found around the requested slope.
class BranchNotFound : public Error {
public:
    using Error::Error;
};

/// Partial inverse requested outside the open image (b1, b2) of a branch.
class ImageDomainError : public Error {
public:
    ImageDomainError(double y, double lo, double hi);

    double value() const noexcept { return y_; }
    double image_lo() const noexcept { return lo_; }
    double image_hi() const noexcept { return hi_; }

private:
    double y_;
    double lo_;
    double hi_;
};

/// Phi(s*) -/+ 2L falls outside the branch image (compatibility fails).
class CompatibilityError : public Error {
public:
    using Error::Error;
};

/// Envelope pair with lower bound above upper bound.
class InvalidEnvelope : public Error {
public:
    using Error::Error;
};

/// The right-hand side returned a non-finite value at a mesh node.
class RhsEvaluationError : public Error {
public:
    RhsEvaluationError(std::size_t node, const std::string& what);
    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

/// Bisection bracket for the beta equation does not straddle the target.
class BracketError : public Error {
public:
    using Error::Error;
};

/// The requested corollary does not apply to this operator.
class WrongCorollary : public Error {
public:
    using Error::Error;
};

/// Excluded parameter combination (e.g. beta == p - 1).
class DegenerateExponent : public Error {
public:
    using Error::Error;
};

/// Config or expression text could not be parsed.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column);
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    /// The message without the location prefix.
    const std::string& message() const noexcept { return message_; }

private:
    std::string message_;
    int line_;
    int column_;
};

} // namespace phibvp
