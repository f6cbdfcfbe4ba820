#pragma once

#include <stdexcept>
#include <string>

namespace ophydro {

// Bad parameters or inadmissible ranges. The CLI maps this to exit code 2.
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative solver exhausted its iteration budget. CLI exit code 3.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ophydro
