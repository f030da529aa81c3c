#pragma once

#include <stdexcept>
#include <string>

namespace locinf {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument errors. Callers can catch these as a group to map onto a usage exit code.
class DomainError : public Error { using Error::Error; };
class IndexError : public Error { using Error::Error; };
class InvalidVertexPair : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class InvalidModel : public Error { using Error::Error; };
class EmptyArmsError : public Error { using Error::Error; };
class UnknownArmError : public Error { using Error::Error; };
class CapacityError : public Error { using Error::Error; };

/// Operation requested in a regime where it is undefined (e.g. progeny of a supercritical model).
class RegimeError : public Error { using Error::Error; };

/// Iterative solver failed to converge, or a linear system was singular.
class NumericalError : public Error { using Error::Error; };

/// A structural model assumption required by a validation routine does not hold.
class AssumptionViolation : public Error { using Error::Error; };

/// Config or model file could not be parsed; message carries line and field.
class ConfigError : public Error { using Error::Error; };

} // namespace locinf
