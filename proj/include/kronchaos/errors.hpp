#pragma once

#include <stdexcept>
#include <string>

namespace kronchaos {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A coordinate lies outside its axis bound.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Matrix or array shapes do not fit together.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Two partial indices that must live on disjoint axes overlap.
class DisjointnessError : public Error {
public:
    using Error::Error;
};

/// An axis set is not a subset / partition of what the operation requires.
class AxisError : public Error {
public:
    using Error::Error;
};

/// An enumeration or buffer would exceed a hard size cap.
class SizeError : public Error {
public:
    using Error::Error;
};

/// A scalar argument is out of its admissible range.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// The input makes the requested quantity undefined (e.g. a zero matrix
/// where the formula divides by its Frobenius norm).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of a verification suite is violated.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// An input file is unreadable or its text is malformed.
class InputError : public Error {
public:
    using Error::Error;
};

}  // namespace kronchaos
