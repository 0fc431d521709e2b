#pragma once

#include <stdexcept>
#include <string>

namespace tsgda {

// Bad caller input (wrong shapes, parameters out of range).
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

// A documented precondition of the mathematics does not hold at the input,
// e.g. tau_star requested at a point that is not a DSE.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine failed to converge or failed its own a-posteriori check.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tsgda
