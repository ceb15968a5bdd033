#pragma once

#include <stdexcept>
#include <string>

namespace quatpinv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define QUATPINV_DEFINE_ERROR(Name)                                \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

QUATPINV_DEFINE_ERROR(DimensionMismatch);
QUATPINV_DEFINE_ERROR(DivisionByZero);
QUATPINV_DEFINE_ERROR(StructureViolation);
QUATPINV_DEFINE_ERROR(RankDeficient);
QUATPINV_DEFINE_ERROR(NotHermitian);
QUATPINV_DEFINE_ERROR(Indefinite);
QUATPINV_DEFINE_ERROR(ConvergenceFailure);
QUATPINV_DEFINE_ERROR(Divergence);
QUATPINV_DEFINE_ERROR(InvalidOrder);
QUATPINV_DEFINE_ERROR(SketchFailure);
QUATPINV_DEFINE_ERROR(Breakdown);
QUATPINV_DEFINE_ERROR(NonPowerOfTwo);
QUATPINV_DEFINE_ERROR(InvalidArgument);
QUATPINV_DEFINE_ERROR(IoError);

#undef QUATPINV_DEFINE_ERROR

}  // namespace quatpinv
