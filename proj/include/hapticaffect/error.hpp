#pragma once

#include <stdexcept>
#include <string>

namespace hapticaffect {

// Every failure raised by the library derives from Error and carries a
// coarse kind, which the CLI and HTTP layers map onto exit codes / statuses.
enum class ErrorKind {
  Input,
  Config,
  Parse,
  Estimation,
  Io,
  Device,
  Validation,
  State,
  Aliasing,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& m) : Error(ErrorKind::Input, m) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(ErrorKind::Config, m) {}
};

/// Malformed estimator reply. The offending text is kept for diagnostics.
class ParseError : public Error {
 public:
  ParseError(const std::string& m, std::string raw)
      : Error(ErrorKind::Parse, m), raw_(std::move(raw)) {}

  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

/// Network / HTTP failure while talking to a remote estimator.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& m)
      : Error(ErrorKind::Estimation, m) {}
};

enum class EstimationCause { Transport, Parse };

const char* to_string(EstimationCause cause) noexcept;

/// Raised once every retry of the remote estimator has failed.
class EstimationError : public Error {
 public:
  EstimationError(EstimationCause cause, int attempts, const std::string& m)
      : Error(ErrorKind::Estimation, m), cause_(cause), attempts_(attempts) {}

  EstimationCause cause() const noexcept { return cause_; }
  int attempts() const noexcept { return attempts_; }

 private:
  EstimationCause cause_;
  int attempts_;
};

class IoError : public Error {
 public:
  IoError(const std::string& m, std::string path)
      : Error(ErrorKind::Io, m + ": " + path), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class DeviceError : public Error {
 public:
  explicit DeviceError(const std::string& m) : Error(ErrorKind::Device, m) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& m)
      : Error(ErrorKind::Validation, m) {}
};

class StateError : public Error {
 public:
  explicit StateError(const std::string& m) : Error(ErrorKind::State, m) {}
};

class AliasingError : public Error {
 public:
  explicit AliasingError(const std::string& m)
      : Error(ErrorKind::Aliasing, m) {}
};

}  // namespace hapticaffect
