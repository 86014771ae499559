#pragma once

#include <stdexcept>
#include <string>

namespace hetbandit {

// Base of every error the library raises. The category lets the CLI map
// failures onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter outside its mathematical domain (p > 1, xi <= 1, m > K, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent configuration text.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hetbandit
