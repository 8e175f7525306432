#ifndef QLM_ERRORS_HPP
#define QLM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qlm {

/// Base class for all toolkit errors. Carries the originating module so the
/// CLI can report provenance alongside the violated precondition.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error("[" + module + "] " + what), module_(std::move(module)) {}
  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

struct ParameterError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct GeometryError : Error {
  using Error::Error;
};
struct FrameError : Error {
  using Error::Error;
};
// Mean-curvature frame undefined: |H| below the convexity threshold somewhere.
struct NonConvexError : Error {
  using Error::Error;
};
struct NotAxisymmetricError : Error {
  using Error::Error;
};
struct NonEmbeddableError : Error {
  using Error::Error;
};
struct ConvexityError : Error {
  using Error::Error;
};
struct ResolutionError : Error {
  using Error::Error;
};
struct FlagError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace qlm

#endif
