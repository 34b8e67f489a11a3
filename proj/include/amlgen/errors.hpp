#pragma once

#include <stdexcept>

namespace amlgen {

// Failure classes surfaced as distinct CLI exit codes.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace amlgen
