#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace helmholtz_cip {

enum class ErrorKind {
  invalid_argument,
  non_manifold_mesh,
  degenerate_element,
  dimension_mismatch,
  singular_system,
  not_converged,
  point_outside_mesh,
  io_failure,
  not_found,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::non_manifold_mesh: return "non_manifold_mesh";
    case ErrorKind::degenerate_element: return "degenerate_element";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::singular_system: return "singular_system";
    case ErrorKind::not_converged: return "not_converged";
    case ErrorKind::point_outside_mesh: return "point_outside_mesh";
    case ErrorKind::io_failure: return "io_failure";
    case ErrorKind::not_found: return "not_found";
  }
  return "unknown";
}

/// Library exception. Every failure path throws this with a kind tag so the
/// CLI can emit a machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace helmholtz_cip
