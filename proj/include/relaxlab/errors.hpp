#ifndef RELAXLAB_ERRORS_HPP
#define RELAXLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace relax {

enum class ErrorCode {
  ShapeMismatch,
  SingularMatrix,
  NotSymmetric,
  Overflow,
  StructureViolation,
  TooFewStages,
  UnknownScheme,
  NullityMismatch,
  SingularP,
  BadMomentOrder,
  UnknownModel,
  SingularStageMatrix,
  NonCommensurateInterval,
  EmptyTable,
  DegenerateFit,
  IoFailure,
  InvalidArgument,
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

}  // namespace relax

#endif
