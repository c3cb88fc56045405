#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace betatrix {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model or function parameter violates its precondition (nonpositive
/// dof, Gamma pole, a <= (beta/2)(m-1), ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Malformed input data: nonfinite matrix entries, bad JSON, size mismatch.
class InputError : public Error {
public:
    using Error::Error;
};

/// Argument outside the support of a density (e.g. nonpositive Laguerre
/// eigenvalue).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Two eigenvalues closer than the degeneracy tolerance, or a vanishing
/// first-row component.
class DegenerateSpectrumError : public Error {
public:
    using Error::Error;
};

/// (lambda, q) outside the image of the tridiagonal bijection.
class BijectionError : public Error {
public:
    using Error::Error;
};

/// A configured resource cap (monomial count, retained samples) was exceeded.
class ResourceError : public Error {
public:
    ResourceError(const std::string& what, std::size_t requested)
        : Error(what), requested_(requested) {}
    std::size_t requested() const noexcept { return requested_; }

private:
    std::size_t requested_;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

} // namespace betatrix
