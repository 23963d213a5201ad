#pragma once

#include <stdexcept>
#include <string>

namespace zerofiber {

/// Base of all library errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed data: wrong tensor degree, out-of-range indices, bad files.
class StructuralError : public Error {
  public:
    using Error::Error;
};

/// Caller-supplied values violate an operation's precondition.
class InputError : public Error {
  public:
    using Error::Error;
};

/// A mathematical precondition failed (class not big, not relatively
/// Kähler, calibration cap exceeded, ...).
class DomainError : public Error {
  public:
    using Error::Error;
};

class NotBigError : public DomainError {
  public:
    using DomainError::DomainError;
};

class NotKahlerError : public DomainError {
  public:
    NotKahlerError(const std::string& what, std::string violated)
        : DomainError(what), violated_(std::move(violated)) {}
    const std::string& violated() const noexcept { return violated_; }

  private:
    std::string violated_;
};

/// An internal invariant was broken. Always a bug or a counterexample.
class InvariantError : public Error {
  public:
    using Error::Error;
};

}  // namespace zerofiber
