#pragma once

#include <stdexcept>
#include <string>

namespace chordseed {

// Root of every domain error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

}  // namespace chordseed
