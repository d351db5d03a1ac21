#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hyperzero {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument violates an operation's documented precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class OutsideDisk : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class DuplicatePoints : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class LengthMismatch : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class UnsupportedExponent : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class PolicyInfeasible : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class InvalidBallFamily : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/// Evaluation requested outside the disk on which the truncation is certified.
class OutOfCertifiedDisk : public Error {
public:
    using Error::Error;
};

class DegenerateInput : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

/// A zero of the integrand lies on (or numerically on) the integration contour.
class ContourTooClose : public Error {
public:
    using Error::Error;
};

class QuadratureUnresolved : public Error {
public:
    using Error::Error;
};

class InsufficientHits : public Error {
public:
    using Error::Error;
};

class GeometryMismatch : public Error {
public:
    using Error::Error;
};

/// A Monte Carlo trial failed; carries enough provenance to replay it.
class TrialFailure : public Error {
public:
    TrialFailure(std::string const& what, std::uint64_t trial, std::uint64_t stream_index,
                 std::uint64_t master_seed)
        : Error(what), trial_(trial), stream_index_(stream_index), master_seed_(master_seed)
    {
    }

    std::uint64_t trial() const noexcept { return trial_; }
    std::uint64_t stream_index() const noexcept { return stream_index_; }
    std::uint64_t master_seed() const noexcept { return master_seed_; }

private:
    std::uint64_t trial_;
    std::uint64_t stream_index_;
    std::uint64_t master_seed_;
};

}  // namespace hyperzero
