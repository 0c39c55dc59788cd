#pragma once

#include <stdexcept>
#include <string>

namespace current_lab {

/// Base class for every error raised by the library.
class LabError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed user input (network files, configs).
class ValidationError : public LabError {
public:
    using LabError::LabError;
};

/// Caller broke a precondition (dimension mismatch, bad vertex id, ...).
class ContractError : public LabError {
public:
    using LabError::LabError;
};

/// Enumeration would exceed a hard size limit.
class CapacityError : public LabError {
public:
    using LabError::LabError;
};

/// An internal identity failed to hold. Should never fire.
class InvariantError : public LabError {
public:
    using LabError::LabError;
};

class NumericalError : public LabError {
public:
    using LabError::LabError;
};

class UnsupportedError : public LabError {
public:
    using LabError::LabError;
};

/// Input law is not of the form superpose_max(Q, Bernoulli(p)).
class NotSuperpositionError : public LabError {
public:
    using LabError::LabError;
};

class DegenerateStateError : public LabError {
public:
    using LabError::LabError;
};

class RunawayError : public LabError {
public:
    using LabError::LabError;
};

}  // namespace current_lab
