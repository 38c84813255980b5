#pragma once

#include <stdexcept>
#include <string>

namespace cellmetrics {

/// Bad user-supplied input (malformed file, unreadable path, invalid
/// parameter). The CLI maps this to exit code 1; anything else that
/// escapes is treated as an internal error (exit code 2).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cellmetrics
