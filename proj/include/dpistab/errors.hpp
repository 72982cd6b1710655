#pragma once

#include <stdexcept>
#include <string>

namespace dpistab {

/// Base of every error the library throws for invalid inputs or numeric failure.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (Z = 0, eps_hat < 0, NaN, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Request beyond a configured capacity (e.g. coefficient order above the maximum).
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Evaluation at a pole, such as theta at r == 1.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// A closed form requested outside the convergence radius of its series.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// A bisection whose end points do not bracket a stability edge.
class ScanRangeError : public Error {
public:
    using Error::Error;
};

}  // namespace dpistab
