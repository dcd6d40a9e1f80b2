#pragma once

#include <stdexcept>

namespace mortml {

/// Base class for everything the toolkit throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration: out-of-range hyperparameters, malformed config files.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input data (CSV shape, label domain, corrupt
/// model payloads).
class DataError : public Error {
public:
    using Error::Error;
};

/// Failures raised while fitting a model (single-class input,
/// non-convergence).
class TrainError : public Error {
public:
    using Error::Error;
};

}  // namespace mortml
