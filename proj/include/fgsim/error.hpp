#pragma once

#include <stdexcept>
#include <string>

namespace fgsim {

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, violated preconditions, invalid configs.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The numbers did not cooperate: singular systems, unstable dynamics,
/// solver non-convergence.
class NumericalError : public Error {
public:
    using Error::Error;
};

class RankDeficientError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A level regression was requested for a pair that the Johansen trace
/// procedure does not find cointegrated.
class NotCointegratedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace fgsim
