#pragma once

#include <stdexcept>

namespace nrsl {

/// Base for every error the simulator raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedNumerology : public Error {
 public:
  using Error::Error;
};

class InfeasibleWindow : public Error {
 public:
  using Error::Error;
};

class EmptyWindow : public Error {
 public:
  using Error::Error;
};

class NoCandidates : public Error {
 public:
  using Error::Error;
};

class InvalidLayout : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class OutOfOrderEvent : public Error {
 public:
  using Error::Error;
};

}  // namespace nrsl
