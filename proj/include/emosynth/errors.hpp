#pragma once

#include <stdexcept>
#include <string>

namespace emosynth {

// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Emotion label outside the 24-term Plutchik vocabulary.
class UnknownEmotion : public Error {
 public:
  explicit UnknownEmotion(const std::string& label)
      : Error("unknown emotion label: '" + label + "'"), label_(label) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

// A structured model reply violated its schema. The raw reply is kept for
// diagnosis.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::string reply_text = {})
      : Error(message), reply_(std::move(reply_text)) {}
  const std::string& reply() const { return reply_; }

 private:
  std::string reply_;
};

// Transport failure or HTTP >= 500 after retries.
class BackendError : public Error {
 public:
  using Error::Error;
};

// HTTP 401/403. Never retried.
class AuthError : public BackendError {
 public:
  using BackendError::BackendError;
};

// HTTP 429 after retries.
class RateLimited : public BackendError {
 public:
  using BackendError::BackendError;
};

// A scripted backend ran out of canned responses.
class ScriptExhausted : public BackendError {
 public:
  using BackendError::BackendError;
};

class OutOfOrderTurn : public Error {
 public:
  using Error::Error;
};

class InsufficientCards : public Error {
 public:
  using Error::Error;
};

class EmptySession : public Error {
 public:
  using Error::Error;
};

class NoGoals : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// An operation was called with its preconditions unmet.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace emosynth
