#pragma once

#include <stdexcept>
#include <string>

namespace latticeflow {

// Input violates a documented precondition (CLI exit code 3).
class precondition_error : public std::invalid_argument {
 public:
  explicit precondition_error(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed job/function/flow specification (CLI exit code 2).
class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// A supplied certificate (regulator + threshold, commutation claim, ...)
// does not hold at grid resolution.
class certificate_error : public std::runtime_error {
 public:
  explicit certificate_error(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite value produced while evaluating a function on a grid.
class eval_error : public std::runtime_error {
 public:
  explicit eval_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace latticeflow
