#pragma once

#include <stdexcept>
#include <string>

namespace wornsim {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FrameMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class UnknownFrame : public Error {
 public:
  using Error::Error;
};

class InvalidModel : public Error {
 public:
  using Error::Error;
};

/// Raised by virtual limb operations that need (or forbid) an attachment.
class Detached : public Error {
 public:
  using Error::Error;
};

class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class MissingSegment : public Error {
 public:
  using Error::Error;
};

class EmptyLog : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration; `path()` is the dotted field path, e.g.
/// "servo.time_constant".
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)),
        message_(message) {}

  const std::string& path() const noexcept { return path_; }
  const std::string& message() const noexcept { return message_; }

  /// Same error with `prefix.` prepended to the path.
  ConfigError nested(const std::string& prefix) const {
    return ConfigError(path_.empty() ? prefix : prefix + "." + path_, message_);
  }

 private:
  std::string path_;
  std::string message_;
};

}  // namespace wornsim
