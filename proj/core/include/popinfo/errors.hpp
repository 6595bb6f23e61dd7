#pragma once

#include <stdexcept>
#include <string>

namespace popinfo {

/// Invalid experiment, population or prior configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A parameter outside the mathematical domain of an operation (e.g. beta outside (0,1)).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Shapes that do not line up (prior length vs. matrix size, support sizes, ...).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-positive-definite curvature or zero-rate neuron with nonzero slope.
class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The enumeration oracle refuses instances that would blow up.
class InstanceTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace popinfo
