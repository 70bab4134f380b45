#pragma once

#include <stdexcept>
#include <string>

namespace fairness {

// Base for every error raised by the library. Computations that merely find
// a fairness gap never throw; these signal that a computation could not run.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownGroupError : public Error {
 public:
  explicit UnknownGroupError(const std::string& label)
      : Error("unknown group '" + label + "'"), label_(label) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

// A caller-supplied value violates an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A solver target that no rule of the supported family can reach.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace fairness
