#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seqcert {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NonConvergentPairing : public Error {
public:
    using Error::Error;
};

class NoMajorant : public Error {
public:
    using Error::Error;
};

class DomainViolation : public Error {
public:
    using Error::Error;
};

class NegativeScale : public Error {
public:
    using Error::Error;
};

class NonConvexBehavior : public Error {
public:
    using Error::Error;
};

class DomainLimited : public Error {
public:
    using Error::Error;
};

class Unbounded : public Error {
public:
    using Error::Error;
};

class MaxSweeps : public Error {
public:
    using Error::Error;
};

class InfeasiblePoint : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

/// Raised when a reduced objective has no partial derivative along e_index.
class PartialNotDifferentiable : public Error {
public:
    explicit PartialNotDifferentiable(std::size_t index)
        : Error("partial derivative " + std::to_string(index) + " does not exist"), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Error raised while processing coordinate `index` of a batch.
class CoordinateError : public Error {
public:
    CoordinateError(std::size_t index, const std::string& what)
        : Error("coordinate " + std::to_string(index) + ": " + what), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

} // namespace seqcert
