#pragma once

#include <stdexcept>
#include <string>

namespace formabench {

// 1-based source location inside a PDDL text.
struct SourcePos {
  int line = 0;
  int col = 0;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PddlError : public Error {
 public:
  PddlError(const std::string& msg, SourcePos pos)
      : Error(msg + " (line " + std::to_string(pos.line) + ", col " +
              std::to_string(pos.col) + ")"),
        pos_(pos),
        raw_(msg) {}
  SourcePos pos() const { return pos_; }
  const std::string& raw_message() const { return raw_; }

 private:
  SourcePos pos_;
  std::string raw_;
};

// Malformed s-expression or token stream.
class SyntaxError : public PddlError {
 public:
  using PddlError::PddlError;
};

// Construct outside the STRIPS + :typing + negative-preconditions subset.
class UnsupportedFeature : public PddlError {
 public:
  using PddlError::PddlError;
};

// Undeclared type/predicate/object, arity mismatch, type-incompatible args.
class SemanticError : public PddlError {
 public:
  using PddlError::PddlError;
};

class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

class ExtractionError : public Error {
 public:
  using Error::Error;
};

class FixtureMissing : public Error {
 public:
  using Error::Error;
};

class NetworkError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public Error {
 public:
  using Error::Error;
};

class ApiError : public Error {
 public:
  ApiError(int status, const std::string& body_excerpt)
      : Error("api error, status " + std::to_string(status) + ": " +
              body_excerpt),
        status_(status) {}
  int status() const { return status_; }

 private:
  int status_ = 0;
};

class ExternalPlannerUnavailable : public Error {
 public:
  using Error::Error;
};

class ExternalPlannerFailure : public Error {
 public:
  using Error::Error;
};

class ManifestMissing : public Error {
 public:
  using Error::Error;
};

class ManifestInvalid : public Error {
 public:
  using Error::Error;
};

class GtUnsolvable : public Error {
 public:
  using Error::Error;
};

class RejectionExhausted : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class ZeroTokens : public Error {
 public:
  using Error::Error;
};

}  // namespace formabench
