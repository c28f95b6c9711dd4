#pragma once

#include <stdexcept>
#include <string>

namespace docsray {

// Base for every error the engine raises on purpose. Callers that need to
// map failures to exit codes or HTTP statuses switch on the derived type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated input contract (empty query, invalid parameters, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Malformed input file or request body.
class ParseError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

// Connection failures and 5xx replies after the retry budget is spent.
class TransportError : public BackendError {
 public:
  TransportError(const std::string& what, int attempts)
      : BackendError(what), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

// Request needs a feature (e.g. image input) the backend lacks.
class CapabilityError : public BackendError {
 public:
  using BackendError::BackendError;
};

class IndexFormatError : public Error {
 public:
  using Error::Error;
};

class VersionMismatch : public IndexFormatError {
 public:
  using IndexFormatError::IndexFormatError;
};

class ChecksumError : public IndexFormatError {
 public:
  using IndexFormatError::IndexFormatError;
};

}  // namespace docsray
