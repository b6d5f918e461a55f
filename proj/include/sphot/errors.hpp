#pragma once

#include <stdexcept>
#include <string>

namespace sphot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SPHOT_DEFINE_ERROR(Name)        \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  };

// Geometry.
SPHOT_DEFINE_ERROR(InvalidArgument)
SPHOT_DEFINE_ERROR(CutLocusViolation)
SPHOT_DEFINE_ERROR(BaseMismatch)
SPHOT_DEFINE_ERROR(DegenerateDistance)
SPHOT_DEFINE_ERROR(CoincidentPoints)
SPHOT_DEFINE_ERROR(DimensionUnsupported)

// Fields.
SPHOT_DEFINE_ERROR(NonSmoothField)

// Transport.
SPHOT_DEFINE_ERROR(SolverNotConverged)
SPHOT_DEFINE_ERROR(SizeLimit)
SPHOT_DEFINE_ERROR(NotCConcave)
SPHOT_DEFINE_ERROR(InfeasibleProblem)

// Entropy.
SPHOT_DEFINE_ERROR(NotADensity)
SPHOT_DEFINE_ERROR(NotPositiveDefinite)
SPHOT_DEFINE_ERROR(DomainError)
SPHOT_DEFINE_ERROR(KappaNonpositive)

// Jacobi fields.
SPHOT_DEFINE_ERROR(NotSymmetric)
SPHOT_DEFINE_ERROR(ConjugatePoint)

#undef SPHOT_DEFINE_ERROR

}  // namespace sphot
