#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace t2s {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document (JSON, JSONL line, scores file).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A structurally valid document whose contents break a type invariant.
// Carries every violation found, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Lexical failure: unterminated string literal, illegal character.
class LexError : public Error {
 public:
  LexError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// SQL outside the supported subset. `span` is the first unparseable token run.
class UnsupportedSyntax : public Error {
 public:
  UnsupportedSyntax(const std::string& what, std::string span)
      : Error(what + " near '" + span + "'"), span_(std::move(span)) {}
  const std::string& span() const { return span_; }

 private:
  std::string span_;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

class LinkageError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Failures that invalidate a whole evaluation run (bad gold, missing database).
class CorpusError : public Error {
 public:
  using Error::Error;
};

class DatabaseError : public Error {
 public:
  using Error::Error;
};

}  // namespace t2s
