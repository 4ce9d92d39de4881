#ifndef OKFLOW_ERRORS_HPP
#define OKFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace okflow {

// Precondition / bad input. CLI maps this to exit code 2.
class input_error : public std::runtime_error {
public:
  explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation that cannot be decided at the current truncation order.
// CLI maps this to exit code 3.
class truncation_error : public std::runtime_error {
public:
  explicit truncation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A certificate that fails re-verification. CLI maps this to exit code 4.
class certificate_error : public std::runtime_error {
public:
  explicit certificate_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace okflow

#endif
