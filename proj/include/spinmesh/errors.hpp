#pragma once

#include <stdexcept>
#include <string>

namespace spinmesh {

// Thrown when a requested construction exceeds a configured size cap.
struct SizeError : std::runtime_error {
  explicit SizeError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an eigensolver or quadrature fails to converge.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spinmesh
