#pragma once

#include <stdexcept>
#include <string>

namespace spinal {

/// Invalid numeric or structural parameter (odd c, N = 0, m < 0.5, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class UnsupportedModulation : public ParameterError {
public:
    using ParameterError::ParameterError;
};

class InvalidMessage : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// Observation matrix does not match (n/k) x L.
class ShapeError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// Exhaustive decoding was asked to enumerate more than the configured cap.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace spinal
