#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bias_audit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A domain value was constructed in a state its invariants forbid.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// -- backend -----------------------------------------------------------------

class BackendError : public Error {
 public:
  using Error::Error;
  /// Stable short identifier written to failure records.
  virtual const char* kind() const noexcept { return "backend_error"; }
};

/// Every retry attempt failed with a transient error.
class ProviderExhausted : public BackendError {
 public:
  using BackendError::BackendError;
  const char* kind() const noexcept override { return "provider_exhausted"; }
};

/// HTTP 401/403. Never retried.
class AuthError : public BackendError {
 public:
  using BackendError::BackendError;
  const char* kind() const noexcept override { return "auth_error"; }
};

/// Non-retryable provider failure (other 4xx, malformed endpoint).
class ProviderError : public BackendError {
 public:
  using BackendError::BackendError;
  const char* kind() const noexcept override { return "provider_error"; }
};

/// Replay backend has no recorded exchange for a (statement, stage) key.
class MissingTranscript : public BackendError {
 public:
  using BackendError::BackendError;
  const char* kind() const noexcept override { return "missing_transcript"; }
};

class MissingPlaceholder : public Error {
 public:
  using Error::Error;
};

class Unparseable : public Error {
 public:
  Unparseable(const std::string& message, std::string response)
      : Error(message), response_(std::move(response)) {}
  const std::string& response() const noexcept { return response_; }

 private:
  std::string response_;
};

// -- dataset -----------------------------------------------------------------

/// Error tied to a data row of an input corpus (0-based, header excluded).
class DatasetError : public Error {
 public:
  DatasetError(const std::string& message, std::size_t row)
      : Error(message), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ParseError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

class UnmappedLabel : public DatasetError {
 public:
  UnmappedLabel(const std::string& message, std::size_t row, std::string value)
      : DatasetError(message, row), value_(std::move(value)) {}
  const std::string& value() const noexcept { return value_; }

 private:
  std::string value_;
};

class EmptyText : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

class SampleTooLarge : public Error {
 public:
  using Error::Error;
};

// -- metrics / report --------------------------------------------------------

class EmptyRun : public Error {
 public:
  using Error::Error;
};

class DegenerateProportions : public Error {
 public:
  using Error::Error;
};

class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

class DisjointIds : public Error {
 public:
  using Error::Error;
};

/// A results file does not conform to the schema. `path()` is a JSON pointer
/// style location such as `results[3].analysis.bias_score`.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace bias_audit
