#pragma once

#include <stdexcept>
#include <string>

namespace textstate {

/// Base class for every error raised by the library. CLI maps these to exit 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (lexicon, corpus, fixture). line is 1-based, 0 if unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line = 0)
      : Error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Structurally valid input violating a domain constraint (unknown enum value,
/// duplicate id, bad range).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  EmptyInputError() : Error("input text is empty") {}
  explicit EmptyInputError(const std::string& msg) : Error(msg) {}
};

/// LLM response with zero parseable interpretations. Carries the raw text for
/// diagnosis; deterministic, never retried.
class MalformedResponseError : public Error {
 public:
  explicit MalformedResponseError(std::string raw)
      : Error("no parseable interpretations in response"), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

class FixtureNotFoundError : public Error {
 public:
  using Error::Error;
};

/// Network-level failure talking to a provider, surfaced after retries.
class TransportError : public Error {
 public:
  TransportError(const std::string& msg, int attempts)
      : Error(msg + " (after " + std::to_string(attempts) + " attempts)"), attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

/// A pipeline stage returned a state violating the state invariants.
class StageContractError : public Error {
 public:
  StageContractError(const std::string& stage, const std::string& what)
      : Error("stage '" + stage + "' violated the state contract: " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// An internal invariant no caller input should be able to break.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace textstate
