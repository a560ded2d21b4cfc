#include "dpgeo/error.hpp"

namespace dpgeo {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_grid: return "invalid-grid";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::grid_mismatch: return "grid-mismatch";
    case ErrorKind::non_decaying_data: return "non-decaying-data";
    case ErrorKind::blow_up_detected: return "blow-up-detected";
    case ErrorKind::degenerate_everywhere: return "degenerate-everywhere";
    case ErrorKind::domain_too_small: return "domain-too-small";
    case ErrorKind::flow_escaped: return "flow-escaped";
    case ErrorKind::pole_detected: return "pole-detected";
    case ErrorKind::certificate_invalid: return "certificate-invalid";
    case ErrorKind::immersion_domain_boundary: return "immersion-domain-boundary";
    case ErrorKind::singular_gauge: return "singular-gauge";
    case ErrorKind::config_error: return "config-error";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace dpgeo
