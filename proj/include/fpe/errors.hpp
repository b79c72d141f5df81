#pragma once

#include <stdexcept>

namespace fpe {

/// Base class for every error the engine raises. The CLI maps each
/// concrete type to a distinct exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector/mask/layout lengths disagree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A parameter is outside its documented domain.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A name or id does not resolve.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Filesystem read/write failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// A file is not in the expected format (magic, version, structure).
class FormatError : public Error {
public:
    using Error::Error;
};

/// A structural invariant does not hold (bad config, corrupt payload).
class ValidationError : public Error {
public:
    using Error::Error;
};

} // namespace fpe
