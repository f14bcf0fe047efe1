#ifndef REVGEO_ERROR_HPP
#define REVGEO_ERROR_HPP

#include <stdexcept>
#include <string>

namespace revgeo {

enum class ErrorKind {
  InvalidParameter,
  SingularAxis,
  Domain,
  Degenerate,
  NoMotion,
  ForbiddenRegion,
  Nonexistent,
  NonPrimitive,
  UnsupportedFamily,
  IntegrationFailure,
  RefineFailure,
  NotFound,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::SingularAxis: return "singular-axis";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::NoMotion: return "no-motion";
    case ErrorKind::ForbiddenRegion: return "forbidden-region";
    case ErrorKind::Nonexistent: return "nonexistent-geodesic";
    case ErrorKind::NonPrimitive: return "retraced-primitive";
    case ErrorKind::UnsupportedFamily: return "unsupported-family";
    case ErrorKind::IntegrationFailure: return "integration-failure";
    case ErrorKind::RefineFailure: return "refine-failure";
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures of the numerics rather than of the inputs.
  bool numerical() const noexcept {
    return kind_ == ErrorKind::IntegrationFailure || kind_ == ErrorKind::RefineFailure;
  }

 private:
  ErrorKind kind_;
};

}  // namespace revgeo

#endif  // REVGEO_ERROR_HPP
