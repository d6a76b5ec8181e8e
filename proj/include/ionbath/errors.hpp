#pragma once

#include <stdexcept>
#include <string>

namespace ionbath {

enum class ErrorKind {
  invalid_argument,
  invalid_index,
  no_convergence,
  transverse_instability,
  unstable_model,
  asymmetric_configuration,
  no_localized_mode,
  no_zero_found,
  untunable,
  dimension_mismatch,
  unphysical_covariance,
  empty_window,
  ill_conditioned_grid,
};

const char* to_string(ErrorKind kind);

// Configuration-type failures (bad input) as opposed to numerical/model failures.
bool is_input_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ionbath
