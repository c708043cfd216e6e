#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wcpd {

/// A stepsize (or prox parameter) violates a strict validity predicate.
class StepsizeViolation : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// The requested oracle (prox, subdifferential, evaluator) is not provided.
class OracleUnavailable : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

/// Starting distance is not strictly inside the convergence ball.
class OutOfBall : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// Operation is not supported for the given problem size.
class Unsupported : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed image file. Carries the byte offset where parsing stopped.
class ImageFormatError : public std::runtime_error
{
public:
  ImageFormatError(std::string const &what, std::size_t offset)
    : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")")
    , offset_(offset)
  {
  }
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

} // namespace wcpd
