#pragma once

#include <stdexcept>
#include <string>

namespace apm {

// Precondition violations (bad arguments, values outside a documented domain).
struct DomainError : std::invalid_argument {
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Work refused because it would exceed a configured resource ceiling.
struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace apm
