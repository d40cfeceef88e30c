#pragma once

#include <stdexcept>
#include <string>

namespace nloc {

/// Base class of every domain error raised by the library. `kind()` is a
/// stable machine-readable tag used by the CLI's structured error output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define NLOC_DEFINE_ERROR(Name, tag)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(tag, what) {}       \
  };

NLOC_DEFINE_ERROR(RangeError, "range")
NLOC_DEFINE_ERROR(StateError, "state")
NLOC_DEFINE_ERROR(SizeError, "size")
NLOC_DEFINE_ERROR(ShapeError, "shape")
NLOC_DEFINE_ERROR(NotHopfError, "not_hopf")
NLOC_DEFINE_ERROR(ResonanceError, "resonance")
NLOC_DEFINE_ERROR(MaxIterationsError, "max_iterations")
NLOC_DEFINE_ERROR(DivergenceError, "divergence")
NLOC_DEFINE_ERROR(ConfigError, "config")
NLOC_DEFINE_ERROR(IoError, "io")

#undef NLOC_DEFINE_ERROR

/// Raised when a diagonal (symbol) operator has a zero on the node set.
class SingularOperatorError : public Error {
 public:
  SingularOperatorError(const std::string& what, double rho)
      : Error("singular_operator", what), rho_(rho) {}
  double rho() const noexcept { return rho_; }

 private:
  double rho_;
};

}  // namespace nloc
