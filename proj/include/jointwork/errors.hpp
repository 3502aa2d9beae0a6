// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace jointwork {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define JOINTWORK_DEFINE_ERROR(Name)                 \
    class Name : public Error {                      \
    public:                                          \
        explicit Name(const std::string& what)       \
            : Error(std::string(#Name ": ") + what) {} \
    };

JOINTWORK_DEFINE_ERROR(NotHermitian)
JOINTWORK_DEFINE_ERROR(NotPsd)
JOINTWORK_DEFINE_ERROR(NotUnitary)
JOINTWORK_DEFINE_ERROR(DegenerateSpectrum)
JOINTWORK_DEFINE_ERROR(DimMismatch)
JOINTWORK_DEFINE_ERROR(ShapeMismatch)
JOINTWORK_DEFINE_ERROR(SizeMismatch)
JOINTWORK_DEFINE_ERROR(IndexOutOfRange)
JOINTWORK_DEFINE_ERROR(InvalidPovm)
JOINTWORK_DEFINE_ERROR(InvalidArgument)
JOINTWORK_DEFINE_ERROR(NonlinearMap)
JOINTWORK_DEFINE_ERROR(NonInvertibleInstrument)
JOINTWORK_DEFINE_ERROR(ZeroVisibility)
JOINTWORK_DEFINE_ERROR(BasisMismatch)
JOINTWORK_DEFINE_ERROR(SolverNonConvergence)

#undef JOINTWORK_DEFINE_ERROR

/// Raised when a Jarzynski energy assignment would take the logarithm of a
/// non-positive number.
class AssignmentDomainError : public Error {
public:
    AssignmentDomainError(std::size_t outcome, double min_visibility, const std::string& what)
        : Error("AssignmentDomainError: " + what), outcome_(outcome), min_visibility_(min_visibility) {}

    std::size_t outcome() const noexcept { return outcome_; }
    /// Smallest visibility for which every logarithm argument is positive.
    double min_visibility() const noexcept { return min_visibility_; }

private:
    std::size_t outcome_;
    double min_visibility_;
};

} // namespace jointwork
