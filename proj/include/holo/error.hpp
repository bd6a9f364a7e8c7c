#pragma once

#include <stdexcept>
#include <string>

namespace holo {

enum class ErrorKind { config, io, numerical };

/// Base for all library errors. The kind decides the CLI exit status
/// (config 2, io 3, numerical 4).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Invalid configuration, arguments, or mismatched input shapes.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

/// Geometry that yields non-finite fields, or other numerical breakdown.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

}  // namespace holo
