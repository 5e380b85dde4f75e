#pragma once

#include <stdexcept>

namespace bicot {

// File access / transport problems. CLI maps these to exit code 1.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Contract violations in user-supplied data. CLI maps these to exit code 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bicot
