#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bvk {

// Base of every error the library throws. The CLI maps InputError and its
// subclasses to exit status 1 and CapabilityError to exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed diagram or certificate text; `position` is a byte offset.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : InputError(what + " (at byte " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class StructuralError : public InputError {
 public:
  using InputError::InputError;
};

// An operation's stated precondition does not hold for the supplied data.
class PreconditionError : public InputError {
 public:
  using InputError::InputError;
};

// A request the library cannot answer within its supported bounds: levels
// past the end of an explicit diagram, polynomial degree limits, search
// bounds exhausted.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class LevelOutOfRange : public CapabilityError {
 public:
  using CapabilityError::CapabilityError;
};

}  // namespace bvk
