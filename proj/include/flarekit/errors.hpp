#pragma once

#include <stdexcept>
#include <string>

namespace flarekit {

/// Base of every error raised by the library. The CLI maps subclasses to
/// exit codes: IoError -> 3, everything else -> 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scalar argument is outside its allowed range (gamma <= 0, bins < 2, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Tone-mapping input outside [0,1].
class DomainError : public Error {
public:
    using Error::Error;
};

/// Two images (or an image and a map) disagree on dimensions.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Input for which the requested quantity is undefined, e.g. min-max
/// normalization of a constant image.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Malformed or undecodable file content.
class FormatError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace flarekit
