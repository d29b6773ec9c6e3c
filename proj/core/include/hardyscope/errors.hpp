#pragma once

#include <stdexcept>
#include <string>

namespace hardyscope {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A point fell outside the chart of a model.
class DomainError : public Error {
public:
    using Error::Error;
};

// Finite-difference stencil would leave the chart.
class StencilError : public Error {
public:
    using Error::Error;
};

// Invalid domain or polygon construction.
class ConstructionError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

}  // namespace hardyscope
