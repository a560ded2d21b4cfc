#pragma once

#include <stdexcept>
#include <string>

namespace dpgeo {

enum class ErrorKind {
  invalid_grid,
  invalid_argument,
  grid_mismatch,
  non_decaying_data,
  blow_up_detected,
  degenerate_everywhere,
  domain_too_small,
  flow_escaped,
  pole_detected,
  certificate_invalid,
  immersion_domain_boundary,
  singular_gauge,
  config_error,
  io_error,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Carries a location (x or t depending on the raiser) with the message.
class LocatedError : public Error {
 public:
  LocatedError(ErrorKind kind, const std::string& what, double where)
      : Error(kind, what), where_(where) {}

  double where() const { return where_; }

 private:
  double where_;
};

}  // namespace dpgeo
