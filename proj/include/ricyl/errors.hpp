#pragma once

#include <stdexcept>
#include <string>

namespace ricyl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual const char* name() const noexcept { return "Error"; }
};

#define RICYL_ERROR(Name)                                             \
  struct Name : Error {                                               \
    using Error::Error;                                               \
    const char* name() const noexcept override { return #Name; }      \
  };

RICYL_ERROR(InvalidArgument)
RICYL_ERROR(DivergentConvolution)
RICYL_ERROR(NonInvertibleSector)
RICYL_ERROR(ResonantTau)
RICYL_ERROR(NotInKernel)
RICYL_ERROR(NonHarmonicTrace)
RICYL_ERROR(InvalidParams)
RICYL_ERROR(RankMismatch)
RICYL_ERROR(NotPositiveDefinite)
RICYL_ERROR(GridTooLarge)
RICYL_ERROR(MissingSeries)

#undef RICYL_ERROR

}  // namespace ricyl
