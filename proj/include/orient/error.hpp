#pragma once

#include <stdexcept>
#include <string>

namespace orient {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid quantum numbers, mismatched bases, malformed arguments.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Evaluation at beta = 0 or pi where the momentum-basis wavefunction diverges.
class PoleError : public Error {
public:
    using Error::Error;
};

/// Insufficient quadrature order, window or grid resolution.
class ConfigError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class IntegrationError : public Error {
public:
    using Error::Error;
};

class SingularityError : public Error {
public:
    using Error::Error;
};

class TruncationError : public Error {
public:
    using Error::Error;
};

class ToleranceError : public Error {
public:
    using Error::Error;
};

/// File system failures while reading inputs or writing outputs.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace orient
