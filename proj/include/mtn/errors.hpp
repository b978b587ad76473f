// SPDX-License-Identifier: Apache-2.0
#ifndef MTN_ERRORS_HPP
#define MTN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mtn {

// Scenario text could not be parsed or failed validation. `where` is a
// human-readable location (line number or JSON path).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what),
        where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

// The requested algorithm cannot handle this scenario (e.g. the level
// construction hit a directed cycle). The message carries a remediation hint.
class UnsupportedScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mtn

#endif  // MTN_ERRORS_HPP
