#pragma once

#include <stdexcept>
#include <string>

namespace drm {

// Root of the library's exception hierarchy. Every failure reported by drm
// derives from this, so callers can catch drm::Error at a module boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  // 1-based line number in the source, counting the header as line 1.
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class EmptyGroupError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class UnsupportedPenaltyError : public Error {
 public:
  using Error::Error;
};

class InvalidBoundsError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

// A linear system that the caller needed to solve is numerically singular.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Newton system of the penalized likelihood could not be factored.
class SingularHessianError : public SingularityError {
 public:
  using SingularityError::SingularityError;
};

}  // namespace drm
