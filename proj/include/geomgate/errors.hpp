#pragma once

#include <stdexcept>
#include <string>

namespace geomgate {

/// Base class for all library errors. `name()` is the stable identifier
/// used in sweep status columns and CLI messages.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class DegeneratePathError : public Error {
 public:
  explicit DegeneratePathError(const std::string& what)
      : Error("DegeneratePath", what) {}
};

class NonConvergenceError : public Error {
 public:
  explicit NonConvergenceError(const std::string& what)
      : Error("NonConvergence", what) {}
};

class AmbiguousPhaseError : public Error {
 public:
  explicit AmbiguousPhaseError(const std::string& what)
      : Error("AmbiguousPhase", what) {}
};

class ConfigError : public Error {
 public:
  ConfigError(std::string name, const std::string& what)
      : Error(std::move(name), what) {}
};

class MissingFieldError : public ConfigError {
 public:
  explicit MissingFieldError(const std::string& key)
      : ConfigError("MissingField", "missing required config field: " + key),
        key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class UnknownFieldError : public ConfigError {
 public:
  explicit UnknownFieldError(const std::string& key)
      : ConfigError("UnknownField", "unknown config field: " + key),
        key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class NonFiniteValueError : public ConfigError {
 public:
  explicit NonFiniteValueError(const std::string& key)
      : ConfigError("NonFiniteValue", "non-finite value for config field: " + key),
        key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error("Usage", what) {}
};

}  // namespace geomgate
