#pragma once

#include <stdexcept>
#include <string>

namespace fishpose {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs violate a documented precondition.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// A ray or pixel falls outside the usable fisheye field of view.
class OutOfFovError : public Error {
public:
    using Error::Error;
};

/// A spherical point lies behind the tangent plane (gnomonic denominator <= 0).
class BehindPlaneError : public Error {
public:
    using Error::Error;
};

/// Malformed or incompatible file content.
class FormatError : public Error {
public:
    using Error::Error;
};

/// An object projects no visible points into the image.
class NotVisibleError : public Error {
public:
    using Error::Error;
};

/// Missing or inconsistent run configuration (model points, symmetry specs, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace fishpose
