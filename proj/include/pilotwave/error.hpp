#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace pilotwave {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: configuration values, lattice-incompatible parameters.
/// The CLI maps this family to exit code 2.
class InvalidInput : public Error {
public:
    using Error::Error;
};

class ConfigInvalid : public InvalidInput {
public:
    ConfigInvalid(std::string field, const std::string& message)
        : InvalidInput(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IncommensurateMomentum : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class UnderresolvedPacket : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Numerical aborts: singular quantities, leaving the stored history.
/// The CLI maps this family to exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

class NonTimelike : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NegativeTimeOrientation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InsufficientHistory : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateDensity : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// An error tied to a spacetime event (t, x).
class LocatedError : public NumericalError {
public:
    LocatedError(const std::string& what, double t, double x)
        : NumericalError(format(what, t, x)), t_(t), x_(x) {}

    double t() const noexcept { return t_; }
    double x() const noexcept { return x_; }

private:
    static std::string format(const std::string& what, double t, double x) {
        std::ostringstream os;
        os.precision(17);
        os << what << " at (t=" << t << ", x=" << x << ")";
        return os.str();
    }

    double t_;
    double x_;
};

class UndefinedFlow : public LocatedError {
public:
    UndefinedFlow(double t, double x) : LocatedError("undefined flow velocity", t, x) {}
};

class VanishingRestDensity : public LocatedError {
public:
    VanishingRestDensity(double t, double x) : LocatedError("rest density below floor", t, x) {}
};

class OutOfHistory : public LocatedError {
public:
    OutOfHistory(double t, double x) : LocatedError("requested time outside stored history", t, x) {}
};

class EffectiveMassNonPositive : public LocatedError {
public:
    EffectiveMassNonPositive(double t, double x) : LocatedError("m + phi <= 0", t, x) {}
};

}  // namespace pilotwave
