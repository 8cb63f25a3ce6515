#pragma once

#include <stdexcept>
#include <string>

namespace svcmimo {

/// An input file could not be parsed. Carries file/line when known.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
  ParseError(const std::string& file, int line, const std::string& msg)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg) {}
};

/// Well-formed data violated a domain invariant; the message names it.
class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No channel candidate met the calibration target.
class CalibrationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace svcmimo
