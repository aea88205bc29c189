// Error types shared by every module. The CLI maps them onto exit codes:
// ValidationError/ParseError -> 2, IoError and anything else -> 3.
#pragma once

#include <stdexcept>
#include <string>

namespace probin {

// A documented precondition does not hold (bad dimension, bad value, bad mode).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Structured text could not be decoded; the message carries file/line context.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A filesystem operation failed.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace probin
