#pragma once

#include <stdexcept>
#include <string>

namespace probe {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the documented domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

// Result would leave the double exponent range.
struct OverflowError : Error {
  using Error::Error;
};

struct QuadratureError : Error {
  using Error::Error;
};

struct SolverError : Error {
  using Error::Error;
};

struct GeometryError : Error {
  using Error::Error;
};

struct ScheduleError : Error {
  using Error::Error;
};

struct BasisMismatchError : Error {
  using Error::Error;
};

// Raised by the scenario parser; key() names the offending config key.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace probe
