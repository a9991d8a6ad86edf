#pragma once

#include <stdexcept>
#include <string>

namespace psdcone {

// Base of every error raised by the library. The CLI maps the concrete
// type to a process exit code (see tools/psdcone.cpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shapes that do not fit together, or a parameter outside its valid range.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Eigensolver failure, non-finite data, or a violated numerical invariant.
class NumericalError : public Error {
public:
    using Error::Error;
};

// A matrix that should have full column rank does not.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

class NotPsdError : public Error {
public:
    using Error::Error;
};

class ChordalityError : public Error {
public:
    using Error::Error;
};

// Min-distance objective needs at least two frames.
class UndefinedObjectiveError : public Error {
public:
    using Error::Error;
};

// Spectral projection left no positive eigenvalue to rescale.
class DegenerateSpectrumError : public Error {
public:
    using Error::Error;
};

class PackingFailure : public Error {
public:
    using Error::Error;
};

class CatalogMiss : public Error {
public:
    using Error::Error;
};

// Malformed input files or configuration.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace psdcone
