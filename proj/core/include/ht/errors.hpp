#pragma once

#include <stdexcept>
#include <string>

namespace ht {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs whose shapes do not fit together (mismatched supports, bad labels, malformed files).
class StructuralError : public Error {
public:
    using Error::Error;
};

/// A parameter lies outside the mathematical domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The exact computation would exceed a fixed size bound.
class CapacityError : public Error {
public:
    using Error::Error;
};

}  // namespace ht
