#include "ionbath/errors.hpp"

namespace ionbath {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_index: return "invalid-index";
    case ErrorKind::no_convergence: return "no-convergence";
    case ErrorKind::transverse_instability: return "transverse-instability";
    case ErrorKind::unstable_model: return "unstable-model";
    case ErrorKind::asymmetric_configuration: return "asymmetric-configuration";
    case ErrorKind::no_localized_mode: return "no-localized-mode";
    case ErrorKind::no_zero_found: return "no-zero-found";
    case ErrorKind::untunable: return "untunable";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::unphysical_covariance: return "unphysical-covariance";
    case ErrorKind::empty_window: return "empty-window";
    case ErrorKind::ill_conditioned_grid: return "ill-conditioned-grid";
  }
  return "unknown";
}

bool is_input_error(ErrorKind kind) {
  return kind == ErrorKind::invalid_argument || kind == ErrorKind::invalid_index;
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace ionbath
