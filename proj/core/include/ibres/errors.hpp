#pragma once

#include <stdexcept>
#include <string>

namespace ibres {

// Exception hierarchy shared by every module. The CLI maps the three
// families onto exit codes (config 2, numerical 3, io 4).

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Time step outside the scheme's stability bound, caught before a run.
class StabilityError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument beyond the range where a special function is representable.
class OutOfRangeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Evaluation at a branch point or singularity (e.g. a Hankel function at 0).
class SingularityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Ratio evaluated at a zero of its denominator.
class PoleError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// An iterative procedure failed to reach its tolerance.
class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Non-finite simulation state (e.g. NaN fiber positions).
class StateError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Simulation blow-up.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, double time) : NumericalError(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Violated precondition (bad shapes, out-of-domain parameters).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace ibres
