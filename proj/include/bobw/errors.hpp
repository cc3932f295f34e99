#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bobw {

// Every failure raised by the library derives from Error so callers can catch
// library failures without swallowing unrelated std exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a potential or a non-finite input.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inverse-gradient target outside the range of the derivative.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

// Iterative solver exhausted its budget. Always a bug for valid inputs.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::size_t round = 0)
      : Error(what), round_(round) {}
  std::size_t round() const { return round_; }
  void set_round(std::size_t r) { round_ = r; }

 private:
  std::size_t round_;
};

class HorizonExceeded : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Pseudo-regret requested for a regime without a gap vector.
class ProfileAbsent : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace bobw
