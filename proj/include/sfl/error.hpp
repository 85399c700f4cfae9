#pragma once

#include <stdexcept>
#include <string>

namespace sfl {

// Bad input: unparseable config, missing field, precondition violation at the
// boundary.  The CLI maps this family (and std::invalid_argument) to exit 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical contract that should hold at runtime did not (lost orthogonality,
// impossible reconstruction error, degenerate truncation).  Exit 3 at the CLI.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sfl
