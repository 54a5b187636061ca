#pragma once

#include <stdexcept>
#include <string>

namespace specdecay {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define SPECDECAY_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                         \
   public:                                                            \
    using Error::Error;                                               \
    const char* kind() const noexcept override { return #Name; }      \
  }

// radial integral tail above tolerance, or a time integral that does not converge
SPECDECAY_DEFINE_ERROR(QuadratureDivergence);
// frequency radius below what the lattice can resolve
SPECDECAY_DEFINE_ERROR(MassUnresolvable);
// dyadic window below what the lattice can resolve
SPECDECAY_DEFINE_ERROR(WindowUnresolvable);
// grid evolution requested beyond 0.1 / k0^2
SPECDECAY_DEFINE_ERROR(HorizonExceeded);
SPECDECAY_DEFINE_ERROR(CFLViolation);
SPECDECAY_DEFINE_ERROR(BlowupDetected);
// fewer than one decade of usable samples for a rate fit
SPECDECAY_DEFINE_ERROR(WindowTooShort);
SPECDECAY_DEFINE_ERROR(InfiniteEnergy);
SPECDECAY_DEFINE_ERROR(ConfigInvalid);
SPECDECAY_DEFINE_ERROR(ExecutionError);
SPECDECAY_DEFINE_ERROR(FormatError);

#undef SPECDECAY_DEFINE_ERROR

}  // namespace specdecay
