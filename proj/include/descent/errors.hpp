#pragma once

#include <stdexcept>
#include <string>

namespace descent {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user-supplied configuration (unknown name, invalid parameter, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A function/gradient evaluation produced a non-finite value.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// No ladder step within the halving cap satisfied the rule's conditions.
class StepCollapseError : public Error {
public:
    using Error::Error;
};

/// A guaranteed inequality failed at runtime (signals invalid inputs,
/// e.g. a Lipschitz field that is not actually a bound).
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Point outside the domain an operation is defined on (e.g. the box of a
/// smooth rate function).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Second-order data requested at a point where the function is not C^2.
class NonSmoothError : public Error {
public:
    using Error::Error;
};

} // namespace descent
