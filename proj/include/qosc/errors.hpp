#pragma once

#include <stdexcept>
#include <string>

namespace qosc {

// Argument outside the support or otherwise invalid for the operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Floating-point trouble: overflow, underflow, non-finite intermediate.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No multiplier satisfies the reputation equality.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qosc
