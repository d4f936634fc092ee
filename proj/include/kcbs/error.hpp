#pragma once

#include <stdexcept>
#include <string>

namespace kcbs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument violates a type invariant (non-unit vector, non-orthogonal matrix, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// The fifth pentagram leg is undefined because the fourth leg is parallel to the first.
class DegenerateClosure : public Error {
public:
    using Error::Error;
};

/// Two contexts disagree on the marginal of an observable they share.
class InconsistentModel : public Error {
public:
    InconsistentModel(const std::string& what, std::size_t context_a, std::size_t context_b)
        : Error(what), context_a_(context_a), context_b_(context_b) {}

    std::size_t context_a() const { return context_a_; }
    std::size_t context_b() const { return context_b_; }

private:
    std::size_t context_a_;
    std::size_t context_b_;
};

/// Structure too large for exhaustive enumeration over all 2^n assignments.
class ScaleGuard : public Error {
public:
    using Error::Error;
};

/// A ray and a model refer to different context structures.
class StructureMismatch : public Error {
public:
    using Error::Error;
};

/// Sample-size planning requested with the true rate equal to the threshold.
class InfeasiblePlan : public Error {
public:
    using Error::Error;
};

}  // namespace kcbs
