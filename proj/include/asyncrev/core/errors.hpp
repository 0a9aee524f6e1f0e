#pragma once

#include <stdexcept>
#include <string>

namespace asyncrev {

// Base for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or length mismatch, empty input where one is required.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Non-finite values, divergence.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Invalid model/policy/experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Operation not allowed in the current session state.
class StateError : public Error {
 public:
  using Error::Error;
};

class VocabError : public Error {
 public:
  using Error::Error;
};

// Loss requested for an alignment that cannot exist (labels but no frames).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Brute-force oracle asked to enumerate an instance that is too large.
class SizeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace asyncrev
