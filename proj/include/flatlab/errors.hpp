#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flatlab {

/// Coarse classification used by the CLI to pick an exit code.
enum class ErrorClass {
  Precondition,  // bad input or configuration
  Verdict,       // a checked mathematical property failed
};

class Error : public std::runtime_error {
 public:
  Error(std::string_view kind, const std::string& what,
        ErrorClass cls = ErrorClass::Precondition)
      : std::runtime_error(std::string(kind) + ": " + what),
        kind_(kind),
        class_(cls) {}

  /// Stable error name, e.g. "SpaceMismatch".
  std::string_view kind() const noexcept { return kind_; }
  ErrorClass error_class() const noexcept { return class_; }

 private:
  std::string_view kind_;
  ErrorClass class_;
};

#define FLATLAB_DEFINE_ERROR(Name, Class)                                  \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(#Name, what, Class) {} \
  }

FLATLAB_DEFINE_ERROR(InvalidDiscretization, ErrorClass::Precondition);
FLATLAB_DEFINE_ERROR(SpaceMismatch, ErrorClass::Precondition);
FLATLAB_DEFINE_ERROR(GeometryMismatch, ErrorClass::Precondition);
FLATLAB_DEFINE_ERROR(ShapeMismatch, ErrorClass::Precondition);
FLATLAB_DEFINE_ERROR(NotAFlat, ErrorClass::Precondition);
FLATLAB_DEFINE_ERROR(InvalidInterval, ErrorClass::Precondition);
FLATLAB_DEFINE_ERROR(SingleBandOnly, ErrorClass::Precondition);
FLATLAB_DEFINE_ERROR(PreconditionError, ErrorClass::Precondition);
FLATLAB_DEFINE_ERROR(NoNonzeroImage, ErrorClass::Precondition);
FLATLAB_DEFINE_ERROR(NotLevelInvariant, ErrorClass::Precondition);
FLATLAB_DEFINE_ERROR(FlatAtScale, ErrorClass::Verdict);
FLATLAB_DEFINE_ERROR(StarvedSide, ErrorClass::Verdict);
FLATLAB_DEFINE_ERROR(InvarianceViolation, ErrorClass::Verdict);
FLATLAB_DEFINE_ERROR(NoClusterPoint, ErrorClass::Verdict);
FLATLAB_DEFINE_ERROR(NotDisjointImages, ErrorClass::Precondition);
FLATLAB_DEFINE_ERROR(ParseError, ErrorClass::Precondition);

#undef FLATLAB_DEFINE_ERROR

}  // namespace flatlab
