#pragma once

#include <stdexcept>
#include <string>

namespace numprag {

// Error classes map one-to-one onto CLI exit codes (see cli.hpp).
enum class ErrorClass {
  Usage,
  Data,
  Inference,
  Elicitation,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), class_(cls) {}
  ErrorClass error_class() const noexcept { return class_; }

 private:
  ErrorClass class_;
};

/// Value outside the active price lattice or an invalid domain object.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorClass::Data, "domain error: " + what) {}
};

/// Weights that cannot be turned into a distribution (all zero or negative).
class NormalizationError : public Error {
 public:
  explicit NormalizationError(const std::string& what)
      : Error(ErrorClass::Inference, "normalization error: " + what) {}
};

class InferenceError : public Error {
 public:
  explicit InferenceError(const std::string& what) : Error(ErrorClass::Inference, "inference error: " + what) {}
};

/// Malformed, incomplete or inconsistent input tables.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorClass::Data, "data error: " + what) {}
};

class TemplateError : public Error {
 public:
  explicit TemplateError(const std::string& what) : Error(ErrorClass::Usage, "template error: " + what) {}
};

/// A completion that carries no usable rating. Keeps the raw text for diagnostics.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string raw)
      : Error(ErrorClass::Elicitation, "parse error: " + what), raw_(std::move(raw)) {}
  const std::string& raw_text() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class ElicitationError : public Error {
 public:
  explicit ElicitationError(const std::string& what)
      : Error(ErrorClass::Elicitation, "elicitation error: " + what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorClass::Io, "i/o error: " + what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorClass::Usage, "usage error: " + what) {}
};

}  // namespace numprag
