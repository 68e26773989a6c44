#pragma once

#include <stdexcept>
#include <string>

namespace vortex {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    /// Short machine-readable name, e.g. "CollisionError".
    [[nodiscard]] virtual const char* kind() const noexcept = 0;
};

/// Problems with the input data itself (bad circulations, collisions,
/// parameters outside a family's domain). The CLI maps these to exit code 3.
class InputError : public Error {
public:
    using Error::Error;
};

/// Failures of a numerical procedure on otherwise valid input. CLI exit code 4.
class NumericalError : public Error {
public:
    using Error::Error;
};

#define VORTEX_DECLARE_ERROR(Name, Base)                                    \
    class Name : public Base {                                              \
    public:                                                                 \
        using Base::Base;                                                   \
        [[nodiscard]] const char* kind() const noexcept override { return #Name; } \
    }

VORTEX_DECLARE_ERROR(InvalidSystem, InputError);
VORTEX_DECLARE_ERROR(CollisionError, InputError);
VORTEX_DECLARE_ERROR(ZeroTotalCirculation, InputError);
VORTEX_DECLARE_ERROR(ZeroAngularImpulse, InputError);
VORTEX_DECLARE_ERROR(ParameterOutOfRange, InputError);
VORTEX_DECLARE_ERROR(NegativeDiscriminant, InputError);
VORTEX_DECLARE_ERROR(DegenerateMomentum, InputError);
VORTEX_DECLARE_ERROR(NotSymmetric, InputError);
VORTEX_DECLARE_ERROR(RankDeficientBasis, InputError);

VORTEX_DECLARE_ERROR(SingularJacobian, NumericalError);
VORTEX_DECLARE_ERROR(TrivialMatchFailure, NumericalError);
VORTEX_DECLARE_ERROR(AmbiguousClassification, NumericalError);
VORTEX_DECLARE_ERROR(ClassificationMismatch, NumericalError);
VORTEX_DECLARE_ERROR(ClusterAmbiguity, NumericalError);
VORTEX_DECLARE_ERROR(DegenerateRestriction, NumericalError);
VORTEX_DECLARE_ERROR(IndefiniteSignXi, NumericalError);
VORTEX_DECLARE_ERROR(ClosedFormMismatch, NumericalError);
VORTEX_DECLARE_ERROR(StepFailure, NumericalError);
VORTEX_DECLARE_ERROR(NonFiniteValue, NumericalError);

#undef VORTEX_DECLARE_ERROR

}  // namespace vortex
