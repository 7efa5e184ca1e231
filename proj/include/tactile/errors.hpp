#pragma once

#include <stdexcept>
#include <string>

namespace tactile {

// Error taxonomy used across the library. The CLI maps ConfigError to exit
// code 2 and IoError to exit code 3; anything else exits 1.

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DegenerateInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SelectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CoverageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OverBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tactile
