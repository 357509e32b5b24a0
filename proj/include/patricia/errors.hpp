#pragma once

#include <stdexcept>
#include <string>

namespace patricia {

// Base for all domain errors thrown by this library.  `code()` is a stable
// machine-readable tag; `what()` adds context.  The CLI maps any Error to
// exit status 3.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define PATRICIA_DEFINE_ERROR(NAME)                          \
  struct NAME : Error {                                      \
    explicit NAME(const std::string& msg) : Error(#NAME, msg) {} \
  }

PATRICIA_DEFINE_ERROR(DepthCapExceeded);
PATRICIA_DEFINE_ERROR(IncomparabilityViolated);
PATRICIA_DEFINE_ERROR(EmptyInput);
PATRICIA_DEFINE_ERROR(NotPrefixClosed);
PATRICIA_DEFINE_ERROR(NotRadixShaped);
PATRICIA_DEFINE_ERROR(NotFull);
PATRICIA_DEFINE_ERROR(NotALeaf);
PATRICIA_DEFINE_ERROR(TooLarge);
PATRICIA_DEFINE_ERROR(BadLabelSet);
PATRICIA_DEFINE_ERROR(AxiomViolation);
PATRICIA_DEFINE_ERROR(SeedAxiomViolation);
PATRICIA_DEFINE_ERROR(EmptySubset);
PATRICIA_DEFINE_ERROR(DegenerateSample);
PATRICIA_DEFINE_ERROR(ZeroMassLeaf);
PATRICIA_DEFINE_ERROR(WrongLeafCount);
PATRICIA_DEFINE_ERROR(PropertyTViolated);
PATRICIA_DEFINE_ERROR(PropertyLRViolated);
PATRICIA_DEFINE_ERROR(BadMeasureSpec);
PATRICIA_DEFINE_ERROR(BadFormat);

#undef PATRICIA_DEFINE_ERROR

}  // namespace patricia
