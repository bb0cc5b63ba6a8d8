#ifndef MIRAGE_ERROR_HPP
#define MIRAGE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mirage {

/// Base class for all structured errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Two transforms were composed whose frames do not chain.
class FrameMismatchError : public Error {
public:
    using Error::Error;
};

/// An input violated a documented type invariant or precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A pose is too close to a singular configuration (e.g. straight arm).
class DegeneratePoseError : public Error {
public:
    using Error::Error;
};

/// A point configuration does not determine a unique solution
/// (too few or collinear correspondences, rank-deficient design).
class DegenerateConfigurationError : public Error {
public:
    using Error::Error;
};

/// Two observations that must be simultaneous are too far apart in time.
class DesynchronizationError : public Error {
public:
    using Error::Error;
};

/// A 3D point cannot be projected (at or behind the camera plane).
class ProjectionDomainError : public Error {
public:
    using Error::Error;
};

/// A marker observation is too close for a reliable mirror estimate.
class UnreliableEstimateError : public Error {
public:
    using Error::Error;
};

/// A skeleton with the wrong chirality flag was passed to an operation.
class ChiralityError : public Error {
public:
    using Error::Error;
};

/// Retargeting failed; the message lists the offending joints.
class RetargetError : public Error {
public:
    using Error::Error;
};

/// The anchor joint could not be resolved on the armature or skeleton.
class AnchoringError : public Error {
public:
    using Error::Error;
};

/// A rig asset violates the armature/mesh contract.
class MalformedRigError : public Error {
public:
    using Error::Error;
};

/// An IR model threshold at or below the noise floor has no finite range.
class UnboundedRangeError : public Error {
public:
    using Error::Error;
};

/// A scalar argument is outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A file or JSON/CSV document could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Filesystem read/write failure; the message carries the path.
class IoError : public Error {
public:
    using Error::Error;
};

/// An end-to-end run aborted (rig load failure, calibration degeneracy, ...).
class PipelineError : public Error {
public:
    using Error::Error;
};

} // namespace mirage

#endif
