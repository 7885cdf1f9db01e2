#pragma once

#include <stdexcept>
#include <string>

namespace dglhom {

// Every failure mode the engine can signal carries a stable code string;
// the CLI maps codes to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define DGLHOM_ERROR_TYPE(Name)                          \
  class Name : public Error {                            \
   public:                                               \
    explicit Name(const std::string& what)               \
        : Error(#Name, what) {}                          \
  }

DGLHOM_ERROR_TYPE(CompositionNonzero);
DGLHOM_ERROR_TYPE(AxiomFailure);
DGLHOM_ERROR_TYPE(TruncationTooSmall);
DGLHOM_ERROR_TYPE(UnitViolation);
DGLHOM_ERROR_TYPE(NotMaurerCartan);
DGLHOM_ERROR_TYPE(NotAnIdeal);
DGLHOM_ERROR_TYPE(ValidityExceeded);
DGLHOM_ERROR_TYPE(NoLift);
DGLHOM_ERROR_TYPE(NotStabilized);
DGLHOM_ERROR_TYPE(DegreeCapExceeded);
DGLHOM_ERROR_TYPE(NotAHomotopy);
DGLHOM_ERROR_TYPE(Incompatible);
DGLHOM_ERROR_TYPE(NoSolution);
DGLHOM_ERROR_TYPE(CapExceeded);
DGLHOM_ERROR_TYPE(InconsistentRestrictions);
DGLHOM_ERROR_TYPE(NotARefinement);
DGLHOM_ERROR_TYPE(CocycleFailure);
DGLHOM_ERROR_TYPE(ShapeMismatch);
DGLHOM_ERROR_TYPE(ParseError);

#undef DGLHOM_ERROR_TYPE

}  // namespace dglhom
