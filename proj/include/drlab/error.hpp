#pragma once

#include <stdexcept>
#include <string>

namespace drlab {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class ZeroProbabilityError : public Error { using Error::Error; };
class PoleError : public Error { using Error::Error; };
class ConvergenceError : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };

}  // namespace drlab
