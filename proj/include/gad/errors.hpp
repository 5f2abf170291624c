#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gad {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Raster dimensions do not line up.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// A value lies outside the domain an operation accepts (non-binary labels,
/// probabilities outside [0,1], channel sums that are not 1).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A metric has no defined value (empty evaluation set, 0/0 Dice).
class UndefinedMetric : public Error {
public:
  using Error::Error;
};

class MissingClassError : public Error {
public:
  MissingClassError(const std::string& what, std::vector<int> classes)
      : Error(what), classes_(std::move(classes)) {}

  const std::vector<int>& classes() const noexcept { return classes_; }

private:
  std::vector<int> classes_;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Malformed file content. Carries the byte offset at which parsing failed.
class FormatError : public IoError {
public:
  FormatError(const std::string& what, std::uint64_t offset)
      : IoError(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

private:
  std::uint64_t offset_;
};

}  // namespace gad
