#pragma once

#include <stdexcept>
#include <string>

namespace varl {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes or sizes that do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A NaN or infinity where a finite value is required.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A value outside its declared domain (action spaces, buffer contents).
class ValidationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace varl
