#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace casimir {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidTopology : public Error {
 public:
  using Error::Error;
};

// Constraints leave some node without any admissible label.
class EmptySpace : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public Error {
 public:
  CapExceeded(double size, double cap)
      : Error("enumeration of " + std::to_string(size) +
              " labelings exceeds the cap of " + std::to_string(cap)),
        size_(size),
        cap_(cap) {}
  double size() const { return size_; }
  double cap() const { return cap_; }

 private:
  double size_;
  double cap_;
};

// A search or provider produced results that contradict its own contract.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ModelFormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace casimir
