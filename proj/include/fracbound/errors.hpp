#pragma once

#include <stdexcept>
#include <string>

namespace fracbound {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FRACBOUND_DEFINE_ERROR(Name)              \
  class Name : public Error {                     \
   public:                                        \
    explicit Name(const std::string& what)        \
        : Error(std::string(#Name ": ") + what) {} \
  }

FRACBOUND_DEFINE_ERROR(InvalidInterval);
FRACBOUND_DEFINE_ERROR(EvalAtSingularity);
FRACBOUND_DEFINE_ERROR(NonIntegrableSpec);
FRACBOUND_DEFINE_ERROR(NotDifferentiable);
FRACBOUND_DEFINE_ERROR(InvalidOrder);
FRACBOUND_DEFINE_ERROR(InvalidExponent);
FRACBOUND_DEFINE_ERROR(GridTooCoarse);
FRACBOUND_DEFINE_ERROR(ParamsOutOfScope);
FRACBOUND_DEFINE_ERROR(InvalidArgument);
FRACBOUND_DEFINE_ERROR(ConfigParseError);
FRACBOUND_DEFINE_ERROR(MissingManifest);

#undef FRACBOUND_DEFINE_ERROR

}  // namespace fracbound
