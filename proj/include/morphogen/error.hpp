#pragma once

#include <stdexcept>
#include <string>

namespace morphogen {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad argument or malformed input (out-of-bounds cell, all-zero weights, ...).
class InputError : public Error {
public:
    using Error::Error;
};

// Operation not possible in the current state (edgeless network, disconnected graph).
class StateError : public Error {
public:
    using Error::Error;
};

// Inconsistent configuration detected before a run starts.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A metric has no defined value for the given pattern (e.g. zero variance in Moran's I).
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

} // namespace morphogen
