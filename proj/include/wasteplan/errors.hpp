#pragma once

#include <stdexcept>
#include <string>

namespace wasteplan {

/// Raised when an input file fails to parse or validate. The message
/// carries the file name and, when known, the offending line number.
class data_error : public std::runtime_error {
public:
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}

  data_error(const std::string& file, long line, const std::string& msg)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg) {}
};

/// Raised when a computation produces a non-finite value.
class numeric_error : public std::runtime_error {
public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace wasteplan
