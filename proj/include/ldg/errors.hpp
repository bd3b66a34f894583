#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ldg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Top eigenvalue of a tensor is (numerically) degenerate.
class ProjectionUndefined : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  using Error::Error;
};

class NumericFailure : public Error {
 public:
  using Error::Error;
};

/// A loop sample could not be projected onto the uniaxial manifold.
class BadLoop : public Error {
 public:
  using Error::Error;
};

/// Sampling too coarse to follow the director continuously.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class NotApplicable : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

class UnsupportedVersion : public FormatError {
 public:
  UnsupportedVersion(std::uint32_t version, std::uint64_t offset)
      : FormatError("unsupported checkpoint version " + std::to_string(version), offset),
        version_(version) {}
  std::uint32_t version() const noexcept { return version_; }

 private:
  std::uint32_t version_;
};

}  // namespace ldg
