#pragma once

#include <stdexcept>
#include <string>

namespace bundling {

// Maps to exit code 2: malformed or inconsistent input.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Maps to exit code 3: an edge has no route in the routing graph.
struct UnroutableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Maps to exit code 4: a library invariant failed.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace bundling
