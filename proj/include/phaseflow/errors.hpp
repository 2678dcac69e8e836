#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phaseflow {

// Base class for everything this library throws.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A structurally invalid StftConfig (bad frame length, hop, window, ...).
struct invalid_config : error {
  using error::error;
};

// Input data that violates an operation's preconditions (wrong dimensions,
// short signals, negative magnitudes, ...).
struct invalid_input : error {
  using error::error;
};

// An algorithm parameter outside its admissible range.
struct invalid_parameter : error {
  using error::error;
};

// A metric that is undefined for the given inputs (e.g. all-zero target).
struct undefined_metric : error {
  using error::error;
};

// File parse/serialization failure. `offset` is the byte position at which
// the problem was detected, when known.
struct io_error : error {
  std::size_t offset = 0;

  explicit io_error(const std::string& what, std::size_t byte_offset = 0)
      : error(byte_offset > 0 ? what + " (at byte " + std::to_string(byte_offset) + ")" : what),
        offset(byte_offset) {}
};

}  // namespace phaseflow
