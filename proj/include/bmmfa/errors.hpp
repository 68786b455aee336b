#pragma once

#include <stdexcept>
#include <string>

namespace bmmfa {

// Bad data handed to a library call (shape mismatch, out-of-range value).
struct input_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A configuration that cannot be run (bad schedule, horizon too short, ...).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller violated a documented precondition (zero sample count, ...).
struct precondition_error : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace bmmfa
