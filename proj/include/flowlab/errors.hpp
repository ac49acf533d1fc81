#pragma once

#include <stdexcept>
#include <string>

namespace flowlab {

// Base for every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

class ExtractionError : public Error {
public:
    using Error::Error;
};

class NoContraction : public Error {
public:
    using Error::Error;
};

class NoTranslation : public Error {
public:
    using Error::Error;
};

class SelectionError : public Error {
public:
    using Error::Error;
};

class IOError : public Error {
public:
    using Error::Error;
};

// An exact quantity exceeded the bound it is supposed to satisfy.
class BoundViolation : public Error {
public:
    using Error::Error;
};

// Broken internal invariant. Always a bug.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace flowlab
