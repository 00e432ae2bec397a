#pragma once

#include <stdexcept>
#include <string>

namespace fibrow {

// One error type for the whole library. The code tells callers (and the CLI
// exit-code mapping) which contract was violated.
enum class Errc {
  // geometry / domain preconditions
  degenerate_projection,
  out_of_domain,
  root_out_of_domain,
  empty_region,
  all_samples_behind_camera,
  too_short,
  dimension_mismatch,
  shape_mismatch,
  k_too_large,
  empty_set,
  empty_roots,
  both_empty,
  not_watertight,
  missing_root,
  config_invalid,
  // file formats
  io_failure,
  magic_mismatch,
  truncated_payload,
  count_mismatch,
  non_finite,
  schema_error,
  unsupported_directive,
  index_out_of_range,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace fibrow
